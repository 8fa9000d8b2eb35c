#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fctl/allocation.hpp"
#include "fctl/arrivals.hpp"
#include "fctl/errors.hpp"
#include "fctl/instance.hpp"

namespace fctl {

using nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw config_error("unknown key \"" + it.key() + "\" in " + where);
    }
}

inline double require_number(const json& j, const char* key,
                             const std::string& where) {
    if (!j.contains(key))
        throw config_error("missing key \"" + std::string(key) + "\" in " + where);
    if (!j.at(key).is_number())
        throw config_error("key \"" + std::string(key) + "\" in " + where +
                           " must be a number");
    return j.at(key).get<double>();
}

}  // namespace detail

// {"kind":"poisson","mean":0.3} | {"kind":"geometric","mean":0.4}
// | {"kind":"negative_binomial","mean":0.1,"variance":0.4}
// | {"kind":"custom","pmf":[...]}
inline ArrivalModel parse_arrival(const json& j, const std::string& where) {
    if (!j.is_object())
        throw config_error("arrival in " + where + " must be an object");
    if (!j.contains("kind"))
        throw config_error("missing key \"kind\" in " + where);
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "poisson") {
            detail::reject_unknown_keys(j, {"kind", "mean"}, where);
            return ArrivalModel::poisson(detail::require_number(j, "mean", where));
        }
        if (kind == "geometric") {
            detail::reject_unknown_keys(j, {"kind", "mean"}, where);
            return ArrivalModel::geometric(detail::require_number(j, "mean", where));
        }
        if (kind == "negative_binomial") {
            detail::reject_unknown_keys(j, {"kind", "mean", "variance"}, where);
            return ArrivalModel::negative_binomial(
                detail::require_number(j, "mean", where),
                detail::require_number(j, "variance", where));
        }
        if (kind == "custom") {
            detail::reject_unknown_keys(j, {"kind", "pmf"}, where);
            if (!j.contains("pmf") || !j.at("pmf").is_array())
                throw config_error("custom arrival in " + where +
                                   " needs a \"pmf\" array");
            return ArrivalModel::custom(j.at("pmf").get<std::vector<double>>());
        }
    } catch (const std::domain_error& e) {
        throw config_error(where + ": " + e.what());
    }
    throw config_error("unknown arrival kind \"" + kind + "\" in " + where);
}

// Green time: a number (integer -> deterministic, otherwise mean-matching
// randomized) or an explicit mixture {"floor":46,"ceil":47,"p":0.13}.
inline GreenTime parse_green(const json& j, const std::string& where) {
    try {
        if (j.is_number()) {
            const double g = j.get<double>();
            return GreenTime::randomized(g);
        }
        if (j.is_object()) {
            detail::reject_unknown_keys(j, {"floor", "ceil", "p"}, where);
            return GreenTime::mixture(
                static_cast<int>(detail::require_number(j, "floor", where)),
                static_cast<int>(detail::require_number(j, "ceil", where)),
                detail::require_number(j, "p", where));
        }
    } catch (const std::domain_error& e) {
        throw config_error(where + ": " + e.what());
    }
    throw config_error("green in " + where + " must be a number or mixture object");
}

struct RunConfig {
    IntersectionSpec spec;
    std::vector<std::optional<GreenTime>> greens;  // per lane, when given
};

inline RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw config_error("config root must be an object");
    detail::reject_unknown_keys(j, {"cycle", "lost_time", "lanes"}, "config");
    RunConfig out;
    out.spec.cycle = detail::require_number(j, "cycle", "config");
    out.spec.lost_time =
        j.contains("lost_time") ? detail::require_number(j, "lost_time", "config")
                                : 0.0;
    if (!j.contains("lanes") || !j.at("lanes").is_array() || j.at("lanes").empty())
        throw config_error("config needs a non-empty \"lanes\" array");
    int index = 0;
    for (const auto& lane : j.at("lanes")) {
        const std::string where = "lanes[" + std::to_string(index) + "]";
        if (!lane.is_object())
            throw config_error(where + " must be an object");
        detail::reject_unknown_keys(lane, {"arrival", "weight", "green"}, where);
        if (!lane.contains("arrival"))
            throw config_error("missing key \"arrival\" in " + where);
        ArrivalModel arrival = parse_arrival(lane.at("arrival"), where + ".arrival");
        double weight = 1.0;
        if (lane.contains("weight"))
            weight = detail::require_number(lane, "weight", where);
        try {
            out.spec.lanes.emplace_back(std::move(arrival), weight);
        } catch (const std::domain_error& e) {
            throw config_error(where + ": " + e.what());
        }
        if (lane.contains("green"))
            out.greens.push_back(parse_green(lane.at("green"), where + ".green"));
        else
            out.greens.push_back(std::nullopt);
        ++index;
    }
    return out;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw config_error("config parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace fctl
