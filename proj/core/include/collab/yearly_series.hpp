#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "collab/errors.hpp"
#include "collab/types.hpp"

namespace collab {

// Year-indexed series of finite doubles. Ordered, gap-tolerant: years are
// whatever keys were inserted, not necessarily contiguous.
class YearlySeries {
  public:
    YearlySeries() = default;

    void set(Year year, double value) {
        if (!std::isfinite(value)) {
            throw RangeError("series value for year " + std::to_string(year) +
                             " is not finite");
        }
        values_[year] = value;
    }

    bool contains(Year year) const { return values_.count(year) != 0; }

    double at(Year year) const {
        auto it = values_.find(year);
        if (it == values_.end()) {
            throw RangeError("series has no value for year " + std::to_string(year));
        }
        return it->second;
    }

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    Year first_year() const {
        if (values_.empty()) throw RangeError("series is empty");
        return values_.begin()->first;
    }
    Year last_year() const {
        if (values_.empty()) throw RangeError("series is empty");
        return values_.rbegin()->first;
    }

    std::vector<Year> years() const {
        std::vector<Year> out;
        out.reserve(values_.size());
        for (const auto& [y, v] : values_) out.push_back(y);
        return out;
    }

    const std::map<Year, double>& data() const { return values_; }

    bool operator==(const YearlySeries&) const = default;

  private:
    std::map<Year, double> values_;
};

// Sparse census table with linear interpolation between anchor years.
// Queries outside the anchored range are refused rather than extrapolated.
class PopulationTable {
  public:
    void set(Year year, double population) {
        if (!std::isfinite(population) || population <= 0.0) {
            throw ConfigError("population for year " + std::to_string(year) +
                              " must be positive and finite");
        }
        anchors_[year] = population;
    }

    bool empty() const { return anchors_.empty(); }
    Year first_year() const {
        if (anchors_.empty()) throw RangeError("population table is empty");
        return anchors_.begin()->first;
    }
    Year last_year() const {
        if (anchors_.empty()) throw RangeError("population table is empty");
        return anchors_.rbegin()->first;
    }

    double interpolate(Year year) const {
        if (anchors_.empty()) throw RangeError("population table is empty");
        auto it = anchors_.lower_bound(year);
        if (it != anchors_.end() && it->first == year) return it->second;
        if (it == anchors_.begin() || it == anchors_.end()) {
            throw RangeError("year " + std::to_string(year) +
                             " is outside the population table range");
        }
        auto hi = it;
        auto lo = std::prev(it);
        const double span = static_cast<double>(hi->first - lo->first);
        const double w = static_cast<double>(year - lo->first) / span;
        return lo->second + w * (hi->second - lo->second);
    }

    const std::map<Year, double>& anchors() const { return anchors_; }

  private:
    std::map<Year, double> anchors_;
};

}  // namespace collab
