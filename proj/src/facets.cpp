#include "softfacet/facets.hpp"

#include <cmath>

namespace softfacet {

BrandVocabulary::BrandVocabulary(std::vector<std::string> names)
{
    for (auto& name : names) {
        if (m_lookup.contains(name)) {
            throw std::invalid_argument("duplicate brand name: " + name);
        }
        m_lookup.emplace(name, m_names.size());
        m_names.push_back(std::move(name));
    }
}

const std::string& BrandVocabulary::name(BrandIndex index) const
{
    if (index >= m_names.size()) {
        throw std::out_of_range("brand index out of range");
    }
    return m_names[index];
}

std::optional<BrandIndex> BrandVocabulary::find(const std::string& name) const
{
    if (auto it = m_lookup.find(name); it != m_lookup.end()) {
        return it->second;
    }
    return std::nullopt;
}

BrandIndex BrandVocabulary::intern(const std::string& name)
{
    if (auto existing = find(name)) {
        return *existing;
    }
    m_lookup.emplace(name, m_names.size());
    m_names.push_back(name);
    return m_names.size() - 1;
}

FacetFilter FacetFilter::categorical(BrandIndex brand_index)
{
    return FacetFilter(CategoricalFilter{brand_index});
}

FacetFilter FacetFilter::range(double lo, double hi)
{
    if (std::isnan(lo) || std::isnan(hi)) {
        throw std::invalid_argument("range bound is NaN");
    }
    if (lo > hi) {
        throw std::invalid_argument("range lower bound exceeds upper bound");
    }
    return FacetFilter(RangeFilter{lo, hi});
}

const CategoricalFilter& FacetFilter::as_categorical() const
{
    if (const auto* c = std::get_if<CategoricalFilter>(&m_value)) {
        return *c;
    }
    throw std::invalid_argument("expected a categorical filter, got a range filter");
}

const RangeFilter& FacetFilter::as_range() const
{
    if (const auto* r = std::get_if<RangeFilter>(&m_value)) {
        return *r;
    }
    throw std::invalid_argument("expected a range filter, got a categorical filter");
}

bool FacetFilter::matches(const Item& item) const
{
    if (const auto* c = std::get_if<CategoricalFilter>(&m_value)) {
        return item.brand_index == c->brand_index;
    }
    const auto& r = std::get<RangeFilter>(m_value);
    return item.price >= r.lo && item.price <= r.hi;
}

Catalog::Catalog(BrandVocabulary brands, std::vector<Item> items) : m_brands(std::move(brands))
{
    m_items.reserve(items.size());
    for (auto& item : items) {
        add(std::move(item));
    }
}

void Catalog::add(Item item)
{
    if (!(item.price >= 0.0) || !std::isfinite(item.price)) {
        throw std::invalid_argument("item " + item.id + " has an invalid price");
    }
    if (item.brand_index >= m_brands.size()) {
        throw std::invalid_argument("item " + item.id + " has an unknown brand index");
    }
    if (m_index.contains(item.id)) {
        throw std::invalid_argument("duplicate item id: " + item.id);
    }
    m_index.emplace(item.id, m_items.size());
    m_items.push_back(std::move(item));
}

const Item* Catalog::find(const ItemId& id) const
{
    if (auto it = m_index.find(id); it != m_index.end()) {
        return &m_items[it->second];
    }
    return nullptr;
}

const Item& Catalog::at(const ItemId& id) const
{
    if (const auto* item = find(id)) {
        return *item;
    }
    throw std::out_of_range("unknown item id: " + id);
}

}  // namespace softfacet
