#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace efqs {

/// Sorted set of distinct 1-based sites of an L-site chain.
class Region {
public:
    Region(int L, std::vector<int> sites, bool allow_empty = false);

    /// Sites first..last inclusive.
    static Region range(int L, int first, int last);
    static Region all(int L);

    int                     total_sites() const { return total_; }
    const std::vector<int>& sites() const { return sites_; }
    int                     size() const { return static_cast<int>(sites_.size()); }
    bool                    empty() const { return sites_.empty(); }
    bool                    is_all() const { return size() == total_; }

    /// Basis-index bits of the member sites.
    std::uint64_t mask() const;

    /// May be empty.
    Region complement() const;
    Region united(const Region& other) const;
    bool   disjoint(const Region& other) const;

    /// Compact form such as "1:4" or "1:2,11:12".
    std::string to_string() const;

    bool operator==(const Region&) const = default;

private:
    int              total_;
    std::vector<int> sites_;
};

} // namespace efqs
