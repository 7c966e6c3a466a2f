#include "senergy/config.hpp"

#include <fstream>
#include <json.hpp>

#include "senergy/error.hpp"

namespace senergy {

namespace {

using json = nlohmann::json;

std::vector<double> number_list(const json& v, const std::string& key) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ParameterError("config key '" + key + "' must be a number or a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ParameterError("config key '" + key + "' must contain numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

template <class T>
T scalar(const json& v, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ParameterError("");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ParameterError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_unsigned()) throw ParameterError("");
        } else {
            if (!v.is_number()) throw ParameterError("");
        }
        return v.get<T>();
    } catch (const ParameterError&) {
        throw ParameterError("config key '" + key + "' has the wrong type");
    }
}

}  // namespace

RunConfig parse_config(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParameterError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParameterError("config must be a JSON object");
    RunConfig c;
    for (const auto& [key, v] : j.items()) {
        if (key == "n") c.n = scalar<std::size_t>(v, key);
        else if (key == "rho") c.rho = scalar<double>(v, key);
        else if (key == "s") c.s = number_list(v, key);
        else if (key == "eps") c.eps = number_list(v, key);
        else if (key == "policy") c.policy = scalar<std::string>(v, key);
        else if (key == "graph") c.graph = scalar<std::string>(v, key);
        else if (key == "edge_prob") c.edge_prob = scalar<double>(v, key);
        else if (key == "dynamics") c.dynamics = scalar<std::string>(v, key);
        else if (key == "type_symmetric") c.type_symmetric = scalar<bool>(v, key);
        else if (key == "steps_cap") c.steps_cap = scalar<std::size_t>(v, key);
        else if (key == "diameter_cutoff") c.diameter_cutoff = scalar<double>(v, key);
        else if (key == "seed") c.seed = scalar<std::uint64_t>(v, key);
        else if (key == "d") c.d = scalar<std::size_t>(v, key);
        else if (key == "alpha") c.alpha = scalar<double>(v, key);
        else if (key == "squeeze") c.squeeze = scalar<std::string>(v, key);
        else if (key == "coupling") c.coupling = scalar<double>(v, key);
        else if (key == "margin") c.margin = scalar<double>(v, key);
        else throw ParameterError("unknown config key '" + key + "'");
    }
    if (c.dynamics != "averaging" && c.dynamics != "stochastic") {
        throw ParameterError("dynamics must be 'averaging' or 'stochastic'");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config '" + path + "'");
    return parse_config(in);
}

}  // namespace senergy
