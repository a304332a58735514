#include "srl/model_io.hpp"

#include <fstream>
#include <utility>

#include <json.hpp>

#include "srl/common.hpp"

namespace srl {

namespace {

using nlohmann::json;

json atoms_to_json(const Parameterization& net) {
    json atoms = json::array();
    for (const Atom& a : net.atoms()) atoms.push_back(json::array({a.outer, a.inner}));
    return atoms;
}

json model_to_json(const Parameterization& net) {
    return json{{"format_version", kModelFormatVersion},
                {"dim_input", net.dim_input()},
                {"atoms", atoms_to_json(net)}};
}

Parameterization model_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("model: document is not a JSON object");
    if (!doc.contains("dim_input") || !doc.contains("atoms"))
        throw ConfigError("model: missing field 'dim_input' or 'atoms'");
    const int d = doc.at("dim_input").get<int>();
    std::vector<Atom> atoms;
    for (const auto& entry : doc.at("atoms")) {
        if (!entry.is_array() || entry.size() != 2)
            throw ConfigError("model: each atom must be [a, [w...]]");
        Atom a;
        a.outer = entry.at(0).get<double>();
        a.inner = entry.at(1).get<std::vector<double>>();
        atoms.push_back(std::move(a));
    }
    return {d, std::move(atoms)};
}

void write_file(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("model: cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("model: cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("model: parse error in '" + path + "': " + e.what());
    }
    return doc;
}

} // namespace

void save_model(const Parameterization& net, const std::string& path) {
    write_file(model_to_json(net), path);
}

Parameterization load_model(const std::string& path) {
    return model_from_json(read_file(path));
}

namespace {

json augmented_model_json(const Parameterization& net, const CanonicalForm& cf,
                          const KappaBounds& kb, bool zero_function) {
    json doc = model_to_json(net);
    json ridge = json::array();
    for (const MeasureAtom& a : cf.ridge)
        ridge.push_back(json::array({a.coefficient, a.direction.unit}));
    doc["canonical"] = json{{"ridge", std::move(ridge)}, {"linear", cf.linear}};
    doc["kappa"] = json{{"lower", kb.lower},
                        {"upper", kb.upper},
                        {"ratio", kb.lower > 0.0 ? kb.upper / kb.lower : 1.0}};
    doc["zero_function"] = zero_function;
    return doc;
}

} // namespace

void save_model_with_canonical(const Parameterization& net, const CanonicalForm& cf,
                               const KappaBounds& kb, bool zero_function,
                               const std::string& path) {
    write_file(augmented_model_json(net, cf, kb, zero_function), path);
}

std::string model_with_canonical_json_string(const Parameterization& net, const CanonicalForm& cf,
                                             const KappaBounds& kb, bool zero_function) {
    return augmented_model_json(net, cf, kb, zero_function).dump(2);
}

std::string model_to_json_string(const Parameterization& net) {
    return model_to_json(net).dump(2);
}

Parameterization model_from_json_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model: parse error: ") + e.what());
    }
    return model_from_json(doc);
}

} // namespace srl
