#ifndef SFTORIENT_DATASET_HPP
#define SFTORIENT_DATASET_HPP

// Abstract rigid-curve data: an orbit table plus signed curve counts.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sftorient/rational.hpp"
#include "sftorient/tuples.hpp"

namespace sftorient {

/// Malformed or inconsistent input; the CLI maps it to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CurveRecord {
    int genus = 0;
    std::vector<std::string> pos;
    std::vector<std::string> neg;
    std::vector<long> homology;
    Rational count{1};
    int c1 = 0;
    bool rigid = true;
};

struct Dataset {
    int n = 2;
    int h2_rank = 0;
    std::vector<OrbitLabel> orbits;
    std::vector<CurveRecord> curves;
    bool geometry_consistent = false;
    std::string source = "<memory>";

    const OrbitLabel& orbit(const std::string& id) const {
        for (const auto& o : orbits) {
            if (o.id == id) {
                return o;
            }
        }
        throw InputError(source + ": unknown orbit id '" + id + "'");
    }

    /// Gradings of a curve's ends as a tuple shape.
    CRTupleShape shape(const CurveRecord& c) const {
        CRTupleShape t;
        for (const auto& id : c.pos) {
            t.pos.push_back(orbit(id).grading);
        }
        for (const auto& id : c.neg) {
            t.neg.push_back(orbit(id).grading);
        }
        t.genus = c.genus;
        t.c1 = c.c1;
        t.n = n;
        return t;
    }
};

namespace detail {

inline Rational count_from_json(const nlohmann::json& j, const std::string& where) {
    if (j.is_number_integer()) {
        return Rational(j.get<long long>());
    }
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    if (j.is_array()) {
        Rational total = 0;
        for (const auto& s : j) {
            if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1)) {
                throw InputError(where + ": sign list entries must be +1 or -1");
            }
            total += s.get<int>();
        }
        return total;
    }
    throw InputError(where + ": count must be an integer, a \"num/den\" string or a list of signs");
}

template <typename T>
T field(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw InputError(where + ": missing field '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(where + ": field '" + key + "' has the wrong type");
    }
}

template <typename T>
T field_or(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? field<T>(j, key, where) : fallback;
}

} // namespace detail

/// Structural parse only; call validate_dataset afterwards.
inline Dataset dataset_from_json(const nlohmann::json& j, const std::string& source) {
    if (!j.is_object()) {
        throw InputError(source + ": top level must be an object");
    }
    Dataset ds;
    ds.source = source;
    ds.n = detail::field<int>(j, "n", source);
    ds.h2_rank = detail::field_or<int>(j, "h2_rank", 0, source);
    if (!j.contains("orbits") || !j.at("orbits").is_array()) {
        throw InputError(source + ": missing orbit list");
    }
    const auto& orbits = j.at("orbits");
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        const std::string where = source + ": orbit " + std::to_string(i);
        const auto& o = orbits[i];
        OrbitLabel label;
        label.id = detail::field<std::string>(o, "id", where);
        label.grading = detail::field_or<int>(o, "grading", -1, where);
        if (o.contains("mu_cz")) {
            label.mu_cz = detail::field<int>(o, "mu_cz", where);
        }
        label.multiplicity = detail::field_or<int>(o, "multiplicity", 1, where);
        label.sort_key = detail::field_or<int>(o, "sort_key", static_cast<int>(i), where);
        if (label.grading < 0) {
            if (!label.mu_cz) {
                throw InputError(where + ": need a grading or a mu_cz");
            }
            label.grading = grading_from_mu(*label.mu_cz, ds.n);
        }
        ds.orbits.push_back(std::move(label));
    }
    const auto curves = j.contains("curves") ? j.at("curves") : nlohmann::json::array();
    if (!curves.is_array()) {
        throw InputError(source + ": curves must be a list");
    }
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const std::string where = source + ": curve " + std::to_string(i);
        const auto& c = curves[i];
        CurveRecord rec;
        rec.genus = detail::field_or<int>(c, "genus", 0, where);
        rec.pos = detail::field<std::vector<std::string>>(c, "pos", where);
        rec.neg = detail::field<std::vector<std::string>>(c, "neg", where);
        rec.homology = detail::field_or<std::vector<long>>(c, "homology", std::vector<long>(ds.h2_rank, 0), where);
        rec.count = c.contains("count") ? detail::count_from_json(c.at("count"), where) : Rational(1);
        rec.c1 = detail::field_or<int>(c, "c1", 0, where);
        rec.rigid = detail::field_or<bool>(c, "rigid", true, where);
        ds.curves.push_back(std::move(rec));
    }
    if (j.contains("flags")) {
        ds.geometry_consistent =
            detail::field_or<bool>(j.at("flags"), "geometry_consistent", false, source + ": flags");
    }
    return ds;
}

/// Replace orbit gradings, in declaration order (sweeps the Z2 data of a file).
inline void override_gradings(Dataset& ds, const std::vector<int>& gradings) {
    if (gradings.size() != ds.orbits.size()) {
        throw InputError(ds.source + ": --gradings lists " + std::to_string(gradings.size()) + " values for " +
                         std::to_string(ds.orbits.size()) + " orbits");
    }
    for (std::size_t i = 0; i < gradings.size(); ++i) {
        if (gradings[i] != 0 && gradings[i] != 1) {
            throw InputError(ds.source + ": grading override " + std::to_string(i) + " is not 0 or 1");
        }
        ds.orbits[i].grading = gradings[i];
        ds.orbits[i].mu_cz.reset();
    }
}

inline void validate_dataset(const Dataset& ds) {
    const std::string& src = ds.source;
    if (ds.n < 1) {
        throw InputError(src + ": n must be at least 1");
    }
    if (ds.h2_rank < 0) {
        throw InputError(src + ": h2_rank must be non-negative");
    }
    std::set<std::string> ids;
    std::set<int> keys;
    for (std::size_t i = 0; i < ds.orbits.size(); ++i) {
        const auto& o = ds.orbits[i];
        const std::string where = src + ": orbit " + std::to_string(i) + " ('" + o.id + "')";
        if (!ids.insert(o.id).second) {
            throw InputError(where + ": duplicate orbit id");
        }
        if (!keys.insert(o.sort_key).second) {
            throw InputError(where + ": duplicate sort_key " + std::to_string(o.sort_key));
        }
        if (o.grading != 0 && o.grading != 1) {
            throw InputError(where + ": grading must be 0 or 1");
        }
        if (o.multiplicity < 1) {
            throw InputError(where + ": multiplicity must be at least 1");
        }
        if (o.mu_cz && grading_from_mu(*o.mu_cz, ds.n) != o.grading) {
            throw InputError(where + ": grading disagrees with mu_cz + n - 1 mod 2");
        }
    }
    for (std::size_t i = 0; i < ds.curves.size(); ++i) {
        const auto& c = ds.curves[i];
        const std::string where = src + ": curve " + std::to_string(i);
        if (c.genus < 0) {
            throw InputError(where + ": genus must be non-negative");
        }
        if (static_cast<int>(c.homology.size()) != ds.h2_rank) {
            throw InputError(where + ": homology vector has length " + std::to_string(c.homology.size()) +
                             ", expected h2_rank = " + std::to_string(ds.h2_rank));
        }
        for (const auto* side : {&c.pos, &c.neg}) {
            std::map<std::string, int> seen;
            for (const auto& id : *side) {
                if (!ids.count(id)) {
                    throw InputError(where + ": unknown orbit id '" + id + "'");
                }
                if (++seen[id] > 1 && ds.orbit(id).grading == 1) {
                    throw InputError(where + ": odd orbit '" + id + "' repeated on one side (monomial vanishes)");
                }
            }
        }
        if (c.rigid && !validate_rigid(ds.shape(c))) {
            throw InputError(where + ": total grading is even, but rigid curves need odd total grading");
        }
    }
}

inline Dataset load_dataset(const std::string& path, const std::optional<std::vector<int>>& gradings = std::nullopt) {
    std::ifstream in(path);
    if (!in) {
        throw InputError(path + ": cannot open dataset");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    Dataset ds = dataset_from_json(j, path);
    if (gradings) {
        override_gradings(ds, *gradings);
    }
    validate_dataset(ds);
    return ds;
}

inline nlohmann::json dataset_to_json(const Dataset& ds) {
    nlohmann::json j;
    j["n"] = ds.n;
    j["h2_rank"] = ds.h2_rank;
    j["orbits"] = nlohmann::json::array();
    for (const auto& o : ds.orbits) {
        nlohmann::json oj{{"id", o.id}, {"grading", o.grading}, {"multiplicity", o.multiplicity},
                          {"sort_key", o.sort_key}};
        if (o.mu_cz) {
            oj["mu_cz"] = *o.mu_cz;
        }
        j["orbits"].push_back(std::move(oj));
    }
    j["curves"] = nlohmann::json::array();
    for (const auto& c : ds.curves) {
        nlohmann::json cj{{"genus", c.genus}, {"pos", c.pos}, {"neg", c.neg}, {"homology", c.homology}};
        if (boost::multiprecision::denominator(c.count) == 1) {
            cj["count"] = static_cast<long long>(boost::multiprecision::numerator(c.count));
        } else {
            cj["count"] = to_fraction_string(c.count);
        }
        if (c.c1 != 0) {
            cj["c1"] = c.c1;
        }
        j["curves"].push_back(std::move(cj));
    }
    j["flags"] = {{"geometry_consistent", ds.geometry_consistent}};
    return j;
}

} // namespace sftorient

#endif // SFTORIENT_DATASET_HPP
