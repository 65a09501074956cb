#include "mbqc/json_io.hpp"

#include <fstream>

namespace mbqc {

json state_to_json(const ResourceState& state, const std::vector<std::size_t>& sign_flips) {
    json doc;
    doc["n"] = state.num_qubits();
    json gens = json::array();
    for (const PauliWord& g : state.group.generators) {
        gens.push_back(g.str());
    }
    doc["generators"] = std::move(gens);
    doc["outputs"] = state.outputs.indices();
    doc["order"] = state.flow.order;
    json r_ops = json::object();
    for (const auto& [qubit, word] : state.flow.r_ops) {
        r_ops[std::to_string(qubit)] = word.str();
    }
    doc["r_ops"] = std::move(r_ops);
    if (!sign_flips.empty()) {
        doc["sign_flips"] = sign_flips;
    }
    return doc;
}

namespace {

void require_field(const json& doc, const char* key) {
    if (!doc.contains(key)) {
        throw ValidationError(std::string("state document is missing field '") + key + "'");
    }
}

}  // namespace

StateDocument state_from_json(const json& doc) {
    for (const char* key : {"n", "generators", "outputs", "order", "r_ops"}) {
        require_field(doc, key);
    }
    StateDocument out;
    const std::size_t n = doc.at("n").get<std::size_t>();
    std::vector<PauliWord> gens;
    for (const auto& text : doc.at("generators")) {
        PauliWord g = PauliWord::parse(text.get<std::string>());
        if (g.num_qubits() != n) {
            throw ValidationError("generator length does not match n: " + g.str());
        }
        gens.push_back(std::move(g));
    }
    out.state.group = check_group(std::move(gens));
    out.state.outputs = QubitSet::of(n, doc.at("outputs").get<std::vector<std::size_t>>());
    out.state.flow.order = doc.at("order").get<std::vector<std::size_t>>();
    for (const auto& [key, value] : doc.at("r_ops").items()) {
        const std::size_t qubit = std::stoul(key);
        PauliWord r = PauliWord::parse(value.get<std::string>());
        if (qubit >= n || r.num_qubits() != n) {
            throw ValidationError("malformed correction entry for qubit " + key);
        }
        out.state.flow.r_ops.emplace(qubit, std::move(r));
    }
    if (doc.contains("sign_flips")) {
        out.sign_flips = doc.at("sign_flips").get<std::vector<std::size_t>>();
        for (std::size_t k : out.sign_flips) {
            if (k >= out.state.group.generators.size()) {
                throw ValidationError("sign flip index out of range");
            }
        }
    }
    check_state(out.state);
    return out;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError("invalid JSON in '" + path + "': " + e.what());
    }
    return doc;
}

StateDocument load_state(const std::string& path) { return state_from_json(read_json(path)); }

void save_json(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

json pauli_sum_to_json(const PauliSum& sum) {
    json doc;
    doc["n"] = sum.num_qubits();
    json terms = json::array();
    for (const auto& [word, coeff] : sum.terms()) {
        json term;
        term["word"] = word.str();
        term["coeff"] = coeff.value();
        term["coeff_exact"] = {coeff.num, coeff.log2_den};
        terms.push_back(std::move(term));
    }
    doc["terms"] = std::move(terms);
    return doc;
}

PauliSum pauli_sum_from_json(const json& doc) {
    PauliSum sum(doc.at("n").get<std::size_t>());
    for (const auto& term : doc.at("terms")) {
        const auto exact = term.at("coeff_exact");
        sum.add(PauliWord::parse(term.at("word").get<std::string>()),
                Dyadic::make(exact.at(0).get<std::int64_t>(), exact.at(1).get<int>()));
    }
    return sum;
}

json spectral_summary_to_json(const SpectralSummary& summary) {
    json doc;
    doc["max"] = summary.max_eig;
    doc["beta"] = summary.beta;
    doc["tau"] = summary.tau;
    doc["nu"] = summary.nu;
    doc["max_multiplicity"] = summary.max_multiplicity;
    return doc;
}

json estimation_report_to_json(const EstimationReport& report) {
    json doc;
    doc["target"] =
        report.target == EstimationReport::Target::mbqc_fidelity ? "mbqc_fidelity" : "state_fidelity";
    doc["estimate"] = report.estimate_clamped;
    doc["estimate_raw"] = report.estimate_raw;
    doc["epsilon"] = report.epsilon;
    doc["delta"] = report.delta;
    doc["samples_used"] = report.samples_used;
    doc["seed"] = report.seed;
    json ledger = json::array();
    for (const LedgerEntry& entry : report.ledger) {
        json row;
        row["word"] = entry.word.str();
        row["shots"] = entry.shots;
        row["mean"] = entry.mean_outcome;
        ledger.push_back(std::move(row));
    }
    doc["ledger"] = std::move(ledger);
    return doc;
}

json bounds_verdict_to_json(const BoundsVerdict& verdict) {
    json doc;
    doc["holds"] = verdict.holds();
    doc["lower_ok"] = verdict.lower_ok;
    doc["upper_ok"] = verdict.upper_ok;
    doc["lower_slack"] = verdict.lower_slack;
    doc["upper_slack"] = verdict.upper_slack;
    return doc;
}

}  // namespace mbqc
