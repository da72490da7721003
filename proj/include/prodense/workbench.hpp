#pragma once

// Instance generation, the JSON instance and witness file formats, and the
// Ackermann bound report.
//
// Instance file:
//   {"version":1, "k0":0, "sizes":[...], "targets":[...], "delta":"1/2",
//    "levels":[{"k":3,"points":[...]} | {"k":3,"bitset_b64":"..."}]}
// `targets` is aligned with `sizes` (entry j is m_{k0+j}). Points are mixed-
// radix indices with the first coordinate least significant; bitsets are
// little-endian bytes (bit i = point i), base64 encoded.
//
// Witness file:
//   {"cut":i, "gamma_points":[...], "I":[[...],...], "levels":[...]}
// `I` lists I_cut, I_{cut+1}, ...; `gamma_points` may be omitted when the cut
// equals k0.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "prodense/bounds.hpp"
#include "prodense/errors.hpp"
#include "prodense/exact.hpp"
#include "prodense/extraction.hpp"
#include "prodense/grid.hpp"
#include "prodense/limits.hpp"

namespace prodense {

/// splitmix64. The stream for a seed is fixed on every platform; reseed()
/// moves to the independent stream seed ^ (counter * 0xD1B54A32D192ED03).
class SeededGenerator {
public:
    explicit SeededGenerator(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, range) by rejection, so no modulo bias.
    std::uint64_t below(std::uint64_t range) {
        if (range == 0) throw DomainError("below: empty range");
        const std::uint64_t reject_under = (0 - range) % range;
        while (true) {
            const std::uint64_t r = next();
            if (r >= reject_under) return r % range;
        }
    }

    void reseed() {
        ++counter_;
        state_ = seed_ ^ (counter_ * 0xD1B54A32D192ED03ull);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    std::uint64_t state_;
};

struct Instance {
    int version = 1;
    std::vector<std::uint64_t> targets;  // aligned with levels.base().sizes
    ExactRational delta = 1;
    LevelFamily levels;

    /// targets re-indexed by absolute coordinate, as the library expects.
    std::vector<std::uint64_t> absolute_targets() const {
        std::vector<std::uint64_t> out(levels.start(), 1);
        out.insert(out.end(), targets.begin(), targets.end());
        return out;
    }
};

inline constexpr std::uint64_t exact_count_cell_limit = std::uint64_t{1} << 20;

namespace detail {

// Samples `count` distinct cells of [0, cells) by partial Fisher-Yates.
inline std::vector<std::uint64_t> sample_distinct(SeededGenerator& gen, std::uint64_t cells, std::uint64_t count) {
    std::vector<std::uint64_t> perm(cells);
    for (std::uint64_t i = 0; i < cells; ++i) perm[i] = i;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t j = i + gen.below(cells - i);
        std::swap(perm[i], perm[j]);
    }
    perm.resize(count);
    return perm;
}

// floor(p * 2^64) for p in [0, 1); a draw r is a success iff r < threshold.
inline std::uint64_t bernoulli_threshold(const ExactRational& p) {
    return to_u64(floor(p * ExactRational(BigNatural(1) << 64)), "bernoulli threshold");
}

inline BitVector bernoulli_bits(SeededGenerator& gen, std::uint64_t cells, const ExactRational& p) {
    BitVector bits(cells, p >= 1);
    if (p >= 1 || p <= 0) return bits;
    const std::uint64_t threshold = bernoulli_threshold(p);
    for (std::uint64_t i = 0; i < cells; ++i) {
        if (gen.next() < threshold) bits.set(i);
    }
    return bits;
}

inline void check_level_keys(const GridShape& base, const std::vector<std::size_t>& level_keys) {
    if (level_keys.empty()) throw DomainError("at least one level is required");
    for (auto k : level_keys) {
        if (k <= base.start || k > base.end()) {
            throw DomainError("level " + std::to_string(k) + " is outside (k0, k0 + sizes]");
        }
    }
}

}  // namespace detail

/// Random levels of density >= delta. Levels up to 2^20 cells get exactly
/// ceil(delta * cells) points; larger ones get independent bits with
/// probability delta + 1/20, redrawn on a fresh stream until the realized
/// density reaches delta.
inline Instance gen_random_levels(std::uint64_t seed, const GridShape& base, const ExactRational& delta,
                                  std::vector<std::size_t> level_keys, std::vector<std::uint64_t> targets = {},
                                  const Limits& limits = {}) {
    detail::require_density(delta, "gen_random_levels: delta");
    detail::check_level_keys(base, level_keys);
    std::sort(level_keys.begin(), level_keys.end());
    level_keys.erase(std::unique(level_keys.begin(), level_keys.end()), level_keys.end());
    if (targets.empty()) targets.assign(base.dimension(), 2);
    if (targets.size() != base.dimension()) throw DomainError("gen_random_levels: one target per coordinate");

    SeededGenerator gen(seed);
    std::map<std::size_t, PointSet> levels;
    for (auto k : level_keys) {
        const GridShape shape = base.prefix(k);
        const std::uint64_t cells = shape.cardinality();
        if (cells > limits.max_cells) throw BudgetExceeded("level " + std::to_string(k) + " exceeds the cell budget");
        if (cells <= exact_count_cell_limit) {
            const auto count = to_u64(ceil(delta * ExactRational(from_u64(cells))), "point count");
            const auto members = detail::sample_distinct(gen, cells, count);
            levels.emplace(k, PointSet::from_indices(shape, members, limits));
            continue;
        }
        const ExactRational boosted = delta + ExactRational(1, 20);
        while (true) {
            PointSet candidate(shape, detail::bernoulli_bits(gen, cells, boosted), limits);
            if (density(candidate) >= delta) {
                levels.emplace(k, std::move(candidate));
                break;
            }
            gen.reseed();
        }
    }
    return Instance{1, std::move(targets), delta, LevelFamily(base, std::move(levels))};
}

struct PlantedInstance {
    Instance instance;
    SubgridWitness planted;  // over [k0, k0 + sizes)
};

/// Levels containing prod_{q<k} I*_q for random I*_q of the target sizes,
/// plus independent noise bits of the given probability. The instance delta
/// is the smallest realized level density.
inline PlantedInstance gen_planted(std::uint64_t seed, const GridShape& base, std::vector<std::uint64_t> targets,
                                   const ExactRational& noise, std::vector<std::size_t> level_keys,
                                   const Limits& limits = {}) {
    detail::check_level_keys(base, level_keys);
    std::sort(level_keys.begin(), level_keys.end());
    level_keys.erase(std::unique(level_keys.begin(), level_keys.end()), level_keys.end());
    if (targets.size() != base.dimension()) throw DomainError("gen_planted: one target per coordinate");
    if (noise < 0 || noise > 1) throw DomainError("gen_planted: noise must lie in [0, 1]");
    for (std::size_t j = 0; j < targets.size(); ++j) {
        if (targets[j] == 0 || targets[j] > base.sizes[j]) throw DomainError("gen_planted: targets must be in [1, n_q]");
    }

    SeededGenerator gen(seed);
    SubgridWitness planted{base.start, {}};
    for (std::size_t j = 0; j < targets.size(); ++j) {
        auto subset = detail::sample_distinct(gen, base.sizes[j], targets[j]);
        std::sort(subset.begin(), subset.end());
        planted.subsets.push_back(std::move(subset));
    }

    std::map<std::size_t, PointSet> levels;
    ExactRational min_density = 1;
    for (auto k : level_keys) {
        const GridShape shape = base.prefix(k);
        const std::uint64_t cells = shape.cardinality();
        if (cells > limits.max_cells) throw BudgetExceeded("level " + std::to_string(k) + " exceeds the cell budget");
        BitVector bits = detail::bernoulli_bits(gen, cells, noise);
        // Odometer over the planted product restricted to [k0, k).
        const std::size_t dims = k - base.start;
        std::vector<std::size_t> pos(dims, 0);
        while (true) {
            std::uint64_t index = 0, stride = 1;
            for (std::size_t j = 0; j < dims; ++j) {
                index += planted.subsets[j][pos[j]] * stride;
                stride *= base.sizes[j];
            }
            bits.set(index);
            std::size_t j = 0;
            while (j < dims && ++pos[j] == planted.subsets[j].size()) pos[j++] = 0;
            if (j == dims) break;
        }
        PointSet level(shape, std::move(bits), limits);
        min_density = std::min(min_density, density(level));
        levels.emplace(k, std::move(level));
    }
    return PlantedInstance{Instance{1, std::move(targets), min_density, LevelFamily(base, std::move(levels))},
                           std::move(planted)};
}

/// FNV-1a 64 over little-endian u64 words: for each level in ascending order
/// its k, its point count, then its member indices in ascending order.
inline std::uint64_t level_checksum(const LevelFamily& levels) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    auto feed = [&](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFF;
            h *= 0x100000001B3ull;
        }
    };
    for (const auto& [k, d] : levels.levels()) {
        feed(k);
        feed(d.count());
        d.bits().for_each_set([&](std::uint64_t i) { feed(i); });
    }
    return h;
}

// ---------------------------------------------------------------------------
// Base64 (RFC 4648, padded)

namespace detail {

inline constexpr std::string_view base64_alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        const std::uint32_t chunk = (std::uint32_t{bytes[i]} << 16) |
                                    (i + 1 < bytes.size() ? std::uint32_t{bytes[i + 1]} << 8 : 0) |
                                    (i + 2 < bytes.size() ? std::uint32_t{bytes[i + 2]} : 0);
        out += base64_alphabet[(chunk >> 18) & 63];
        out += base64_alphabet[(chunk >> 12) & 63];
        out += i + 1 < bytes.size() ? base64_alphabet[(chunk >> 6) & 63] : '=';
        out += i + 2 < bytes.size() ? base64_alphabet[chunk & 63] : '=';
    }
    return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) throw ParseError("base64 length is not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::uint32_t chunk = 0;
        int pad = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            const char c = text[i + j];
            std::uint32_t v = 0;
            if (c == '=') {
                if (i + 4 != text.size() || j < 2) throw ParseError("misplaced base64 padding");
                ++pad;
            } else {
                if (pad) throw ParseError("base64 data after padding");
                const auto pos = base64_alphabet.find(c);
                if (pos == std::string_view::npos) throw ParseError(std::string("invalid base64 character '") + c + "'");
                v = static_cast<std::uint32_t>(pos);
            }
            chunk = (chunk << 6) | v;
        }
        if ((pad == 2 && (chunk & 0xFFFF) != 0) || (pad == 1 && (chunk & 0xFF) != 0)) {
            throw ParseError("non-canonical base64: nonzero bits before the padding");
        }
        out.push_back(static_cast<std::uint8_t>(chunk >> 16));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((chunk >> 8) & 0xFF));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(chunk & 0xFF));
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// JSON files

enum class LevelEncoding { automatic, points, bitset };

namespace detail {

using nlohmann::json;

inline void reject_unknown_fields(const json& obj, std::initializer_list<std::string_view> allowed,
                                  const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ParseError(where + ": unknown field \"" + key + "\"");
    }
}

inline const json& require_field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
    return obj.at(key);
}

inline std::uint64_t as_natural(const json& v, const std::string& where) {
    if (!v.is_number_unsigned()) {
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
        throw ParseError(where + ": expected a natural number");
    }
    return v.get<std::uint64_t>();
}

inline std::vector<std::uint64_t> as_naturals(const json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected an array");
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_natural(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline ExactRational as_rational(const json& v, const std::string& where) {
    if (!v.is_string()) throw ParseError(where + ": expected a \"p/q\" string");
    try {
        return parse_rational(v.get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
    }
}

inline json parse_json_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(where + ": " + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const Instance& inst, LevelEncoding encoding = LevelEncoding::automatic) {
    using nlohmann::json;
    json levels = json::array();
    for (const auto& [k, d] : inst.levels.levels()) {
        const bool as_points = encoding == LevelEncoding::points ||
                               (encoding == LevelEncoding::automatic && d.cardinality() <= 4096);
        if (as_points) {
            levels.push_back({{"k", k}, {"points", d.indices()}});
        } else {
            levels.push_back({{"k", k}, {"bitset_b64", detail::base64_encode(to_bytes(d))}});
        }
    }
    return json{{"version", inst.version},
                {"k0", inst.levels.start()},
                {"sizes", inst.levels.base().sizes},
                {"targets", inst.targets},
                {"delta", to_string(inst.delta)},
                {"levels", std::move(levels)}};
}

inline Instance instance_from_json(const nlohmann::json& j, const Limits& limits = {}) {
    detail::reject_unknown_fields(j, {"version", "k0", "sizes", "targets", "delta", "levels"}, "instance");
    const auto version = detail::as_natural(detail::require_field(j, "version", "instance"), "instance.version");
    if (version != 1) throw ParseError("instance.version: unsupported version " + std::to_string(version));
    const auto k0 = detail::as_natural(detail::require_field(j, "k0", "instance"), "instance.k0");
    auto sizes = detail::as_naturals(detail::require_field(j, "sizes", "instance"), "instance.sizes");
    auto targets = detail::as_naturals(detail::require_field(j, "targets", "instance"), "instance.targets");
    const auto delta = detail::as_rational(detail::require_field(j, "delta", "instance"), "instance.delta");
    if (targets.size() != sizes.size()) throw ParseError("instance.targets: expected one entry per size");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == 0) throw ParseError("instance.sizes[" + std::to_string(i) + "]: sizes must be >= 1");
    }
    const GridShape base(k0, std::move(sizes));

    const auto& jl = detail::require_field(j, "levels", "instance");
    if (!jl.is_array()) throw ParseError("instance.levels: expected an array");
    std::map<std::size_t, PointSet> levels;
    for (std::size_t i = 0; i < jl.size(); ++i) {
        const std::string where = "instance.levels[" + std::to_string(i) + "]";
        const auto& entry = jl[i];
        detail::reject_unknown_fields(entry, {"k", "points", "bitset_b64"}, where);
        const auto k = detail::as_natural(detail::require_field(entry, "k", where), where + ".k");
        if (k <= k0 || k > base.end()) throw ParseError(where + ".k: level outside (k0, k0 + len(sizes)]");
        if (levels.contains(k)) throw ParseError(where + ".k: duplicate level");
        const bool has_points = entry.contains("points");
        const bool has_bits = entry.contains("bitset_b64");
        if (has_points == has_bits) throw ParseError(where + ": exactly one of points / bitset_b64 is required");
        const GridShape shape = base.prefix(k);
        try {
            if (has_points) {
                const auto points = detail::as_naturals(entry.at("points"), where + ".points");
                levels.emplace(k, PointSet::from_indices(shape, points, limits));
            } else {
                if (!entry.at("bitset_b64").is_string()) throw ParseError(where + ".bitset_b64: expected a string");
                const auto bytes = detail::base64_decode(entry.at("bitset_b64").get<std::string>());
                levels.emplace(k, from_bytes(shape, bytes, limits));
            }
        } catch (const DomainError& e) {
            throw ParseError(where + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    return Instance{1, std::move(targets), delta, LevelFamily(base, std::move(levels))};
}

inline Instance parse_instance(const std::string& text, const Limits& limits = {}) {
    return instance_from_json(detail::parse_json_text(text, "instance"), limits);
}

inline Instance read_instance(const std::string& path, const Limits& limits = {}) {
    return instance_from_json(detail::parse_json_text(detail::read_file(path), path), limits);
}

inline void write_instance(const Instance& inst, const std::string& path, LevelEncoding encoding = LevelEncoding::automatic) {
    detail::write_file(path, instance_to_json(inst, encoding).dump() + "\n");
}

struct WitnessFile {
    std::size_t cut = 0;
    std::optional<std::vector<std::uint64_t>> gamma_points;
    std::vector<std::vector<std::uint64_t>> subsets;  // I_cut, I_{cut+1}, ...
    std::vector<std::size_t> levels;

    SubgridWitness witness() const { return SubgridWitness{cut, subsets}; }
    friend bool operator==(const WitnessFile&, const WitnessFile&) = default;
};

inline nlohmann::json witness_to_json(const WitnessFile& w) {
    nlohmann::json j{{"cut", w.cut}, {"I", w.subsets}, {"levels", w.levels}};
    if (w.gamma_points) j["gamma_points"] = *w.gamma_points;
    return j;
}

inline WitnessFile witness_from_json(const nlohmann::json& j) {
    detail::reject_unknown_fields(j, {"cut", "gamma_points", "I", "levels"}, "witness");
    WitnessFile w;
    w.cut = detail::as_natural(detail::require_field(j, "cut", "witness"), "witness.cut");
    if (j.contains("gamma_points")) w.gamma_points = detail::as_naturals(j.at("gamma_points"), "witness.gamma_points");
    const auto& ji = detail::require_field(j, "I", "witness");
    if (!ji.is_array()) throw ParseError("witness.I: expected an array of arrays");
    for (std::size_t q = 0; q < ji.size(); ++q) w.subsets.push_back(detail::as_naturals(ji[q], "witness.I[" + std::to_string(q) + "]"));
    for (auto k : detail::as_naturals(detail::require_field(j, "levels", "witness"), "witness.levels")) {
        w.levels.push_back(k);
    }
    return w;
}

inline WitnessFile read_witness(const std::string& path) {
    return witness_from_json(detail::parse_json_text(detail::read_file(path), path));
}

inline void write_witness(const WitnessFile& w, const std::string& path) {
    detail::write_file(path, witness_to_json(w).dump() + "\n");
}

struct LevelVerdict {
    std::size_t level = 0;
    bool ok = false;
    std::string reason;
};

/// Checks the witness against every level it names: subset sizes equal the
/// targets and Gamma followed by prod I_q lies inside D_k.
inline std::vector<LevelVerdict> verify_witness(const Instance& inst, const WitnessFile& w) {
    const auto& levels = inst.levels;
    if (w.cut < levels.start() || w.cut > levels.base().end()) throw DomainError("witness cut outside the instance");
    const GridShape head = levels.base().prefix(w.cut);
    PointSet gamma;
    if (w.gamma_points) {
        gamma = PointSet::from_indices(head, *w.gamma_points);
    } else if (w.cut == levels.start()) {
        gamma = PointSet::full(head);
    } else {
        throw DomainError("witness: gamma_points is required when the cut is above k0");
    }
    const auto targets = inst.absolute_targets();
    std::vector<LevelVerdict> out;
    for (auto k : w.levels) {
        LevelVerdict v{k, false, {}};
        if (!levels.levels().contains(k)) {
            v.reason = "level is not in the instance";
        } else if (k <= w.cut || w.cut + w.subsets.size() < k) {
            v.reason = "witness does not cover the level's coordinates";
        } else {
            try {
                const SubgridWitness used{w.cut, {w.subsets.begin(), w.subsets.begin() + static_cast<std::ptrdiff_t>(k - w.cut)}};
                check_witness(used, levels.base(), std::span(targets).subspan(w.cut, k - w.cut));
                v.ok = contains_product(levels.at(k), used, gamma);
                if (!v.ok) v.reason = "product is not contained in the level";
            } catch (const DomainError& e) {
                v.reason = e.what();
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bound report

struct BoundRow {
    std::size_t k = 0;
    BigNatural f;                 // f of the prefix (m_0..m_k)
    BigNatural tower_argument;    // 5 s_delta pm_k
    std::size_t tower_iterations = 0;
    bool prop_holds = false;
    ExactRational lemma_eps;      // 2^{-s_delta}
    Lemma41Check lemma_base2;
    Lemma41Check lemma_natural;
};

struct BoundReport {
    ExactRational delta;
    std::vector<std::uint64_t> targets;
    std::uint64_t s = 0;
    std::vector<BoundRow> rows;
};

/// f values against A_2^{(1+k)}(5 s_delta pm_k), plus T at eps = 2^{-s_delta}
/// against A_2(5 p_eps pm_k) in both log bases. Requires 0 < delta <= 1/2 and
/// every target >= 2.
inline BoundReport bound_report(const ExactRational& delta, std::span<const std::uint64_t> targets,
                                const Limits& limits = {}) {
    const auto prop = check_prop43(delta, targets, limits);
    BoundReport report{delta, {targets.begin(), targets.end()}, s_delta(delta), {}};
    const ExactRational eps = inverse_pow2(report.s);
    for (const auto& row : prop) {
        const auto prefix = targets.first(row.k + 1);
        report.rows.push_back(BoundRow{row.k, row.f, row.bound.argument, row.bound.iterations, row.holds, eps,
                                       check_lemma41(eps, prefix, LogBase::two, limits),
                                       check_lemma41(eps, prefix, LogBase::natural, limits)});
    }
    return report;
}

inline nlohmann::json bound_report_json(const BoundReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"k", row.k},
                        {"f", to_string(row.f)},
                        {"f_bits", bit_length(row.f)},
                        {"tower", {{"iterations", row.tower_iterations}, {"argument", to_string(row.tower_argument)}}},
                        {"prop_holds", row.prop_holds},
                        {"lemma_eps", to_string(row.lemma_eps)},
                        {"lemma_t", to_string(row.lemma_base2.left)},
                        {"lemma_base2", {{"p", row.lemma_base2.p}, {"holds", row.lemma_base2.holds}}},
                        {"lemma_natural", {{"p", row.lemma_natural.p}, {"holds", row.lemma_natural.holds}}}});
    }
    return {{"delta", to_string(r.delta)}, {"targets", r.targets}, {"s_delta", r.s}, {"rows", rows}};
}

namespace detail {

inline std::string short_number(const BigNatural& n) {
    const std::string s = to_string(n);
    if (s.size() <= 24) return s;
    return "<" + std::to_string(bit_length(n)) + "-bit>";
}

}  // namespace detail

inline std::string bound_report_text(const BoundReport& r) {
    std::ostringstream out;
    out << "delta=" << to_string(r.delta) << " s_delta=" << r.s << " targets=(";
    for (std::size_t i = 0; i < r.targets.size(); ++i) out << (i ? "," : "") << r.targets[i];
    out << ")\n";
    out << "k  f_k                       tower                          prop  T(eps=" << to_string(r.rows.empty() ? ExactRational(0) : r.rows.front().lemma_eps)
        << ")  lemma(log2)  lemma(ln)\n";
    for (const auto& row : r.rows) {
        std::string tower = "A_2^(" + std::to_string(row.tower_iterations) + ")(" + to_string(row.tower_argument) + ")";
        out << row.k << "  " << detail::short_number(row.f);
        out << std::string(26 - std::min<std::size_t>(25, detail::short_number(row.f).size()), ' ') << tower
            << std::string(31 - std::min<std::size_t>(30, tower.size()), ' ') << (row.prop_holds ? "pass" : "FAIL") << "  "
            << detail::short_number(ceil(row.lemma_base2.left)) << "  p=" << row.lemma_base2.p << " "
            << (row.lemma_base2.holds ? "pass" : "FAIL") << "  p=" << row.lemma_natural.p << " "
            << (row.lemma_natural.holds ? "pass" : "FAIL") << "\n";
    }
    return out.str();
}

}  // namespace prodense
