#pragma once
//
// Canonical instance files:
//
//   { "m": 3,
//     "hypotheses": [[-1,-1,-1], [1,-1,-1]],
//     "distributions": [{"marginal": [...], "eta_plus": [...]}],
//     "nu": 0.05,                                   (optional)
//     "meta": {"id": "...", "family": "...", "params": {...}} }   (optional)
//
// Doubles are written in shortest round-trip form, so a read after a write
// reproduces every value bit for bit.
//

#include "amdl/core.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace amdl {

struct InstanceFile {
    Instance instance;
    std::string id;
    std::string family;
    nlohmann::json params = nlohmann::json::object();
};

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& obj, const char* name) {
    if (!obj.is_object() || !obj.contains(name)) throw schema_error(std::string("instance file is missing '") + name + "'");
    return obj.at(name);
}

inline std::vector<double> realArray(const nlohmann::json& value, std::size_t expected, const char* what) {
    if (!value.is_array() || value.size() != expected)
        throw schema_error(std::string(what) + " must be an array of length " + std::to_string(expected));
    std::vector<double> out;
    for (const auto& v : value) {
        if (!v.is_number()) throw schema_error(std::string(what) + " entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace detail

inline nlohmann::json toJson(const Instance& inst, const std::string& id = {}, const std::string& family = {},
                             const nlohmann::json& params = nlohmann::json::object(), bool withNu = true) {
    nlohmann::json doc;
    doc["m"] = inst.domainSize();
    auto& hs = doc["hypotheses"] = nlohmann::json::array();
    for (const auto& h : inst.hypotheses()) {
        auto row = nlohmann::json::array();
        for (Label y : h.labels()) row.push_back(static_cast<int>(y));
        hs.push_back(std::move(row));
    }
    auto& ds = doc["distributions"] = nlohmann::json::array();
    for (const auto& d : inst.distributions()) {
        nlohmann::json entry;
        entry["marginal"] = std::vector<double>(d.marginal().begin(), d.marginal().end());
        entry["eta_plus"] = std::vector<double>(d.etaPlus().begin(), d.etaPlus().end());
        ds.push_back(std::move(entry));
    }
    if (withNu) doc["nu"] = inst.declaredNu() ? *inst.declaredNu() : bestNu(inst).nu;
    if (!id.empty() || !family.empty()) doc["meta"] = {{"id", id}, {"family", family}, {"params", params}};
    return doc;
}

inline InstanceFile instanceFromJson(const nlohmann::json& doc) {
    const auto& mField = detail::field(doc, "m");
    if (!mField.is_number_integer() || mField.get<long long>() < 1) throw schema_error("'m' must be a positive integer");
    const auto m = static_cast<std::size_t>(mField.get<long long>());

    const auto& hField = detail::field(doc, "hypotheses");
    if (!hField.is_array() || hField.empty()) throw schema_error("'hypotheses' must be a non-empty array");
    std::vector<Hypothesis> hs;
    for (const auto& row : hField) {
        if (!row.is_array() || row.size() != m) throw schema_error("every hypothesis must have length m");
        std::vector<Label> labels;
        for (const auto& v : row) {
            if (!v.is_number_integer()) throw schema_error("hypothesis labels must be integers");
            labels.push_back(static_cast<Label>(v.get<int>()));
        }
        hs.emplace_back(std::move(labels));
    }

    const auto& dField = detail::field(doc, "distributions");
    if (!dField.is_array() || dField.empty()) throw schema_error("'distributions' must be a non-empty array");
    std::vector<LabeledDistribution> ds;
    for (const auto& entry : dField)
        ds.emplace_back(detail::realArray(detail::field(entry, "marginal"), m, "marginal"),
                        detail::realArray(detail::field(entry, "eta_plus"), m, "eta_plus"));

    std::optional<double> nu;
    if (doc.contains("nu")) {
        if (!doc.at("nu").is_number()) throw schema_error("'nu' must be a number");
        nu = doc.at("nu").get<double>();
    }

    InstanceFile file{Instance(HypothesisClass(std::move(hs)), std::move(ds), nu), {}, {}, nlohmann::json::object()};
    if (doc.contains("meta")) {
        const auto& meta = doc.at("meta");
        if (meta.contains("id")) file.id = meta.at("id").get<std::string>();
        if (meta.contains("family")) file.family = meta.at("family").get<std::string>();
        if (meta.contains("params")) file.params = meta.at("params");
    }
    return file;
}

inline InstanceFile readInstanceFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open instance file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw schema_error("instance file '" + path + "' is not valid JSON: " + e.what());
    }
    auto file = instanceFromJson(doc);
    if (file.id.empty()) file.id = path;
    return file;
}

inline void writeInstanceFile(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw schema_error("cannot write instance file '" + path + "'");
    out << doc.dump(2) << '\n';
}

} // namespace amdl
