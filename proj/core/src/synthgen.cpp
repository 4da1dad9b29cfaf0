#include "collab/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "collab/errors.hpp"

namespace collab {

namespace {

constexpr std::uint32_t kAbsent = 0xffffffffu;

// Categorical sampler over team sizes; fixed kind bypasses it entirely.
struct SizeSampler {
    TeamSizeSpec::Kind kind = TeamSizeSpec::Kind::fixed;
    std::uint32_t fixed = 3;
    std::vector<std::uint32_t> sizes;
    std::vector<double> cum;  // cumulative probabilities, back() == 1

    std::uint32_t draw(SplitMix64& rng) const {
        if (kind == TeamSizeSpec::Kind::fixed) return fixed;
        const double u = rng.next_double();
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()),
                                               sizes.size() - 1);
        return sizes[idx];
    }
};

SizeSampler make_size_sampler(const TeamSizeSpec& spec) {
    SizeSampler sampler;
    sampler.kind = spec.kind;
    if (spec.kind == TeamSizeSpec::Kind::fixed) {
        sampler.fixed = spec.fixed_size;
        return sampler;
    }
    double total = 0.0;
    if (spec.kind == TeamSizeSpec::Kind::categorical) {
        for (const auto& [size, weight] : spec.categories) {
            sampler.sizes.push_back(size);
            total += weight;
            sampler.cum.push_back(total);
        }
    } else {
        // q(n) ~ (n-1)^-gamma / n over [2, max_size]: size-biased so that a
        // uniformly chosen member of a uniformly chosen slot sees its count
        // of new partners k = n-1 distributed ~ k^-gamma under cap 1.
        for (std::uint32_t n = 2; n <= spec.max_size; ++n) {
            sampler.sizes.push_back(n);
            total += std::pow(static_cast<double>(n - 1), -spec.gamma) / n;
            sampler.cum.push_back(total);
        }
    }
    for (double& c : sampler.cum) c /= total;
    sampler.cum.back() = 1.0;
    return sampler;
}

double expected_events(const GrowthSpec& growth, Year year, Year start_year) {
    const double t = static_cast<double>(year - start_year + 1);
    if (growth.breakpoint && year > *growth.breakpoint) {
        const double tb = static_cast<double>(*growth.breakpoint - start_year + 1);
        return growth.scale * std::pow(tb, growth.alpha) * std::pow(t / tb, growth.alpha2);
    }
    return growth.scale * std::pow(t, growth.alpha);
}

}  // namespace

void validate_scenario(const ScenarioConfig& config) {
    std::vector<std::string> bad;
    if (config.end_year < config.start_year) bad.emplace_back("end_year precedes start_year");
    if (!(config.growth.scale > 0.0) || !std::isfinite(config.growth.scale)) {
        bad.emplace_back("growth scale must be positive and finite");
    }
    if (!std::isfinite(config.growth.alpha)) bad.emplace_back("growth alpha must be finite");
    if (config.growth.breakpoint) {
        if (*config.growth.breakpoint < config.start_year ||
            *config.growth.breakpoint > config.end_year) {
            bad.emplace_back("growth breakpoint must lie within [start_year, end_year]");
        }
        if (!std::isfinite(config.growth.alpha2)) bad.emplace_back("growth alpha2 must be finite");
    }
    switch (config.team_size.kind) {
        case TeamSizeSpec::Kind::fixed:
            if (config.team_size.fixed_size < 1) bad.emplace_back("fixed team size must be >= 1");
            break;
        case TeamSizeSpec::Kind::categorical:
            if (config.team_size.categories.empty()) {
                bad.emplace_back("categorical team sizes need at least one entry");
            }
            for (const auto& [size, weight] : config.team_size.categories) {
                if (size < 1) bad.emplace_back("categorical team size must be >= 1");
                if (!(weight > 0.0) || !std::isfinite(weight)) {
                    bad.emplace_back("categorical team size weights must be positive and finite");
                }
            }
            break;
        case TeamSizeSpec::Kind::partner_powerlaw:
            if (!(config.team_size.gamma > 1.0) || !std::isfinite(config.team_size.gamma)) {
                bad.emplace_back("partner power-law gamma must exceed 1");
            }
            if (config.team_size.max_size < 3) {
                bad.emplace_back("partner power-law max_size must be >= 3");
            }
            break;
    }
    if (!(config.career.weibull_k > 0.0) || !std::isfinite(config.career.weibull_k)) {
        bad.emplace_back("career weibull_k must be positive and finite");
    }
    if (!(config.career.weibull_lambda > 0.0) || !std::isfinite(config.career.weibull_lambda)) {
        bad.emplace_back("career weibull_lambda must be positive and finite");
    }
    if (!(config.entrant_share >= 0.0) || !(config.entrant_share <= 1.0)) {
        bad.emplace_back("entrant_share must lie in [0, 1]");
    }
    if (!(config.entrant_share_decay >= 0.0) || !std::isfinite(config.entrant_share_decay)) {
        bad.emplace_back("entrant_share_decay must be >= 0 and finite");
    }
    for (const auto& shock : config.shocks) {
        const std::string tag = shock.name.empty() ? "<unnamed>" : shock.name;
        if (shock.name.empty()) bad.emplace_back("shock is missing a name");
        if (shock.end < shock.start) bad.emplace_back("shock '" + tag + "' ends before it starts");
        if (!(shock.entry_multiplier >= 0.0) || !std::isfinite(shock.entry_multiplier)) {
            bad.emplace_back("shock '" + tag + "' entry_multiplier must be >= 0 and finite");
        }
        if (!(shock.size_multiplier > 0.0) || !std::isfinite(shock.size_multiplier)) {
            bad.emplace_back("shock '" + tag + "' size_multiplier must be positive and finite");
        }
        if (shock.recovery_ramp_years < 0) {
            bad.emplace_back("shock '" + tag + "' recovery_ramp_years must be >= 0");
        }
    }
    if (!bad.empty()) {
        std::string msg = "invalid scenario: ";
        for (std::size_t i = 0; i < bad.size(); ++i) {
            if (i) msg += "; ";
            msg += bad[i];
        }
        throw ConfigError(msg);
    }
}

double weibull_from_uniform(double k, double lambda, double u) {
    if (!(k > 0.0) || !(lambda > 0.0)) {
        throw RangeError("weibull parameters must be positive");
    }
    if (!(u > 0.0) || u > 1.0) throw RangeError("weibull uniform input must lie in (0, 1]");
    return lambda * std::pow(-std::log(u), 1.0 / k);
}

double sample_weibull(double k, double lambda, SplitMix64& rng) {
    return weibull_from_uniform(k, lambda, 1.0 - rng.next_double());
}

double weibull_quantile(double k, double lambda, double p) {
    if (!(k > 0.0) || !(lambda > 0.0)) {
        throw RangeError("weibull parameters must be positive");
    }
    if (!(p >= 0.0) || p >= 1.0) throw RangeError("weibull quantile input must lie in [0, 1)");
    return lambda * std::pow(-std::log1p(-p), 1.0 / k);
}

GeneratedScenario generate(const ScenarioConfig& config) {
    validate_scenario(config);
    GeneratedScenario out;
    out.truth.config = config;

    const Year start = config.start_year;
    const Year end = config.end_year;
    const std::uint32_t cap = config.participation_cap;
    const SizeSampler sampler = make_size_sampler(config.team_size);

    std::vector<Year> death_year;                      // by contributor id
    std::vector<std::uint32_t> alive;                  // ids not yet retired
    std::vector<std::uint32_t> alive_pos;              // id -> index in alive
    std::vector<Year> last_used_year;                  // per-year usage stamps
    std::vector<std::uint32_t> used_count;
    std::map<Year, std::vector<std::uint32_t>> death_buckets;

    const auto bump_usage = [&](std::uint32_t id, Year t) {
        if (last_used_year[id] != t) {
            last_used_year[id] = t;
            used_count[id] = 1;
        } else {
            ++used_count[id];
        }
    };

    const auto add_contributor = [&](Year t, SplitMix64& rng) {
        const auto id = static_cast<std::uint32_t>(death_year.size());
        const double draw =
            weibull_from_uniform(config.career.weibull_k, config.career.weibull_lambda,
                                 1.0 - rng.next_double());
        const double career = std::max(1.0, std::ceil(draw));
        // Deaths past the horizon are censored; clamp so Year arithmetic
        // cannot overflow on heavy-tailed career draws.
        const Year death = career > static_cast<double>(end - t)
                               ? end + 1
                               : t + static_cast<Year>(career) - 1;
        death_year.push_back(death);
        alive_pos.push_back(static_cast<std::uint32_t>(alive.size()));
        alive.push_back(id);
        last_used_year.push_back(t);
        used_count.push_back(1);
        if (death <= end) death_buckets[death].push_back(id);
        return id;
    };

    const auto retire = [&](std::uint32_t id) {
        const std::uint32_t pos = alive_pos[id];
        const std::uint32_t last = alive.back();
        alive[pos] = last;
        alive_pos[last] = pos;
        alive.pop_back();
        alive_pos[id] = kAbsent;
    };

    enum : std::uint8_t { kEntrant = 0, kLeaver = 1, kSurvivor = 2 };
    std::uint64_t total_events = 0;
    std::vector<std::uint32_t> sizes;
    std::vector<std::uint8_t> slot_types;
    std::vector<std::uint32_t> eligible;  // survivor pool for the current year
    std::vector<ContributorId> members;

    for (Year t = start; t <= end; ++t) {
        SplitMix64 rng = substream(config.seed, static_cast<std::uint64_t>(t - start));
        const double tt = static_cast<double>(t - start + 1);

        double entry_mult = 1.0;
        double size_mult = 1.0;
        for (const auto& shock : config.shocks) {
            if (t >= shock.start && t <= shock.end) {
                entry_mult *= shock.entry_multiplier;
                size_mult *= shock.size_multiplier;
            } else if (t > shock.end && shock.recovery_ramp_years > 0 &&
                       t <= shock.end + shock.recovery_ramp_years) {
                const double frac = static_cast<double>(t - shock.end) /
                                    static_cast<double>(shock.recovery_ramp_years);
                entry_mult *= shock.entry_multiplier + (1.0 - shock.entry_multiplier) * frac;
            }
        }

        const auto events_n = static_cast<std::uint64_t>(
            std::max<long long>(0, std::llround(expected_events(config.growth, t, start))));

        sizes.clear();
        sizes.reserve(events_n);
        std::uint64_t slots = 0;
        for (std::uint64_t e = 0; e < events_n; ++e) {
            std::uint32_t n = sampler.draw(rng);
            if (size_mult != 1.0) {
                const double scaled = n * size_mult;
                const double fl = std::floor(scaled);
                n = static_cast<std::uint32_t>(fl) + (rng.next_double() < scaled - fl ? 1 : 0);
                n = std::max<std::uint32_t>(n, 1);
            }
            sizes.push_back(n);
            slots += n;
        }

        const double share =
            config.entrant_share * std::pow(tt, -config.entrant_share_decay);
        const auto entrants_target = static_cast<std::uint64_t>(std::max<long long>(
            0, std::llround(share * static_cast<double>(slots) * entry_mult)));

        std::vector<std::uint32_t> leavers;
        if (const auto it = death_buckets.find(t); it != death_buckets.end()) {
            leavers = it->second;  // everyone here predates this year's entrants
        }

        const std::uint64_t entrant_slots = std::min(entrants_target, slots);
        const std::uint64_t leaver_slots =
            std::min<std::uint64_t>(leavers.size(), slots - entrant_slots);

        slot_types.assign(slots, kSurvivor);
        std::fill_n(slot_types.begin(), entrant_slots, kEntrant);
        std::fill_n(slot_types.begin() + static_cast<std::ptrdiff_t>(entrant_slots), leaver_slots,
                    kLeaver);
        for (std::uint64_t i = slots; i > 1; --i) {
            const std::uint64_t j = rng.next_below(i);
            std::swap(slot_types[i - 1], slot_types[j]);
        }

        eligible.clear();
        for (const std::uint32_t id : alive) {
            if (death_year[id] > t) eligible.push_back(id);
        }

        std::uint64_t entrants_placed = 0;
        std::uint64_t leavers_placed = 0;
        std::size_t slot_cursor = 0;
        std::size_t leaver_cursor = 0;

        const auto draw_survivor = [&](SplitMix64& r) -> std::uint32_t {
            for (int attempt = 0; attempt < 64 && !eligible.empty(); ++attempt) {
                const auto idx = static_cast<std::size_t>(r.next_below(eligible.size()));
                const std::uint32_t id = eligible[idx];
                if (std::find(members.begin(), members.end(), id) != members.end()) continue;
                bump_usage(id, t);
                if (cap > 0 && used_count[id] >= cap) {
                    eligible[idx] = eligible.back();
                    eligible.pop_back();
                }
                return id;
            }
            return kAbsent;
        };

        out.events.reserve(out.events.size() + events_n);
        for (std::uint64_t e = 0; e < events_n; ++e) {
            members.clear();
            for (std::uint32_t s = 0; s < sizes[e]; ++s, ++slot_cursor) {
                const std::uint8_t type = slot_types[slot_cursor];
                std::uint32_t id = kAbsent;
                if (type == kLeaver) {
                    id = leavers[leaver_cursor++];
                    bump_usage(id, t);
                    ++leavers_placed;
                } else if (type == kSurvivor) {
                    id = draw_survivor(rng);
                }
                if (id == kAbsent) {
                    // Entrant slot, or the surviving pool could not supply a
                    // distinct member: mint a fresh contributor either way so
                    // team sizes stay exact.
                    id = add_contributor(t, rng);
                    ++entrants_placed;
                    if ((cap == 0 || used_count[id] < cap) && death_year[id] > t) {
                        eligible.push_back(id);
                    }
                }
                members.push_back(id);
            }
            ProjectEvent event;
            event.project_id = "p" + std::to_string(t) + "-" + std::to_string(e);
            event.completion_year = t;
            event.members = members;
            out.events.push_back(std::move(event));
        }

        if (const auto it = death_buckets.find(t); it != death_buckets.end()) {
            for (const std::uint32_t id : it->second) retire(id);
            death_buckets.erase(it);
        }

        out.truth.yearly.push_back(YearTruth{t, events_n, slots, entrants_target, entrants_placed,
                                             static_cast<std::uint64_t>(leavers.size()),
                                             leavers_placed});
        total_events += events_n;
    }

    out.truth.total_events = total_events;
    out.truth.total_contributors = death_year.size();
    return out;
}

}  // namespace collab
