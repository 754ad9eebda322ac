#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace softfacet {

using ItemId = std::string;
using BrandIndex = std::size_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A catalog entity with one categorical facet (brand) and one ordinal facet (price).
struct Item {
    ItemId id;
    BrandIndex brand_index = 0;
    double price = 0.0;
    std::string title;
};

/// Ordered, duplicate-free list of brand names. Index i names brand i.
class BrandVocabulary {
  public:
    BrandVocabulary() = default;
    explicit BrandVocabulary(std::vector<std::string> names);

    [[nodiscard]] std::size_t size() const noexcept { return m_names.size(); }
    [[nodiscard]] const std::string& name(BrandIndex index) const;
    [[nodiscard]] std::optional<BrandIndex> find(const std::string& name) const;
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return m_names; }

    /// Returns the index of `name`, appending it when absent.
    BrandIndex intern(const std::string& name);

  private:
    std::vector<std::string> m_names;
    std::unordered_map<std::string, BrandIndex> m_lookup;
};

struct CategoricalFilter {
    BrandIndex brand_index = 0;
    friend bool operator==(const CategoricalFilter&, const CategoricalFilter&) = default;
};

/// Closed price range [lo, hi]. Open ends are encoded as -inf / +inf.
struct RangeFilter {
    double lo = -kInfinity;
    double hi = kInfinity;
    friend bool operator==(const RangeFilter&, const RangeFilter&) = default;
};

/// A single facet selection made by a user.
class FacetFilter {
  public:
    static FacetFilter categorical(BrandIndex brand_index);
    /// Throws std::invalid_argument if lo > hi or either bound is NaN.
    static FacetFilter range(double lo, double hi);

    [[nodiscard]] bool is_categorical() const noexcept
    {
        return std::holds_alternative<CategoricalFilter>(m_value);
    }
    [[nodiscard]] bool is_range() const noexcept
    {
        return std::holds_alternative<RangeFilter>(m_value);
    }

    /// Throws std::invalid_argument when the filter is of the other kind.
    [[nodiscard]] const CategoricalFilter& as_categorical() const;
    [[nodiscard]] const RangeFilter& as_range() const;

    /// Literal (hard) satisfaction: brand equality or price in the closed range.
    [[nodiscard]] bool matches(const Item& item) const;

    friend bool operator==(const FacetFilter&, const FacetFilter&) = default;

  private:
    explicit FacetFilter(std::variant<CategoricalFilter, RangeFilter> value)
        : m_value(value)
    {}

    std::variant<CategoricalFilter, RangeFilter> m_value;
};

/// Items plus the brand vocabulary they index into.
class Catalog {
  public:
    Catalog() = default;
    Catalog(BrandVocabulary brands, std::vector<Item> items);

    /// Throws std::invalid_argument on duplicate ids, negative prices or bad brand indices.
    void add(Item item);

    [[nodiscard]] const BrandVocabulary& brands() const noexcept { return m_brands; }
    BrandVocabulary& brands() noexcept { return m_brands; }
    [[nodiscard]] const std::vector<Item>& items() const noexcept { return m_items; }
    [[nodiscard]] const Item* find(const ItemId& id) const;
    /// Throws std::out_of_range for unknown ids.
    [[nodiscard]] const Item& at(const ItemId& id) const;
    [[nodiscard]] std::size_t size() const noexcept { return m_items.size(); }

  private:
    BrandVocabulary m_brands;
    std::vector<Item> m_items;
    std::unordered_map<ItemId, std::size_t> m_index;
};

}  // namespace softfacet
