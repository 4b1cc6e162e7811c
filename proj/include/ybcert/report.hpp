#pragma once

// Report assembly and rendering (text, JSON, CSV) for the command-line
// front end. Counts and the reactive percentage refer to the in-service
// branch list as parsed, before parallel reduction, which is how the usual
// case summaries are quoted.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ybcert/certify.hpp"
#include "ybcert/matpower.hpp"

namespace ybcert {

struct ComponentReport {
    int id = 0;
    std::string condition;
    std::optional<long> root;  // original bus id
};

struct Report {
    std::string case_name;
    int n_nodes = 0;
    int n_branches = 0;
    double reactive_branch_pct = 0.0;  // rounded to 0.1
    Verdict verdict = Verdict::Inconclusive;
    std::optional<std::int64_t> rank_claim;
    double runtime_ms = 0.0;
    double tolerance = 0.0;
    std::vector<ComponentReport> components;
    std::optional<std::vector<Complex>> witness;
};

inline double reactive_branch_percent(const Network& net, double tol) {
    if (net.branches().empty()) return 0.0;
    std::size_t reactive = 0;
    for (const Branch& b : net.branches())
        if (std::abs(b.y_series.real()) <= tol) ++reactive;
    const double pct = 100.0 * static_cast<double>(reactive) / static_cast<double>(net.branches().size());
    return std::round(pct * 10.0) / 10.0;
}

inline Report make_report(const CaseNetwork& cn, const Certificate& cert, double runtime_ms) {
    Report rep;
    rep.case_name = cn.name;
    rep.n_nodes = cn.net.node_count();
    rep.n_branches = static_cast<int>(cn.net.branches().size());
    rep.reactive_branch_pct = reactive_branch_percent(cn.net, cert.tolerance);
    rep.verdict = cert.verdict;
    rep.rank_claim = cert.rank_claim;
    rep.runtime_ms = runtime_ms;
    rep.tolerance = cert.tolerance;
    for (const ConditionEvidence& ev : cert.evidence) {
        ComponentReport comp;
        comp.id = ev.component_id;
        comp.condition = to_string(ev.condition);
        if (ev.root) comp.root = cn.bus_ids[static_cast<std::size_t>(*ev.root)];
        rep.components.push_back(std::move(comp));
    }
    rep.witness = cert.null_witness;
    return rep;
}

inline nlohmann::ordered_json report_to_json(const Report& rep) {
    nlohmann::ordered_json j;
    j["case"] = rep.case_name;
    j["verdict"] = to_string(rep.verdict);
    if (rep.rank_claim)
        j["rank"] = *rep.rank_claim;
    else
        j["rank"] = nullptr;
    j["n"] = rep.n_nodes;
    j["l"] = rep.n_branches;
    j["reactive_pct"] = rep.reactive_branch_pct;
    j["components"] = nlohmann::ordered_json::array();
    for (const ComponentReport& comp : rep.components) {
        nlohmann::ordered_json jc;
        jc["id"] = comp.id;
        jc["condition"] = comp.condition;
        if (comp.root)
            jc["root"] = *comp.root;
        else
            jc["root"] = nullptr;
        j["components"].push_back(std::move(jc));
    }
    if (rep.witness) {
        j["witness"] = nlohmann::ordered_json::array();
        for (const Complex& v : *rep.witness) j["witness"].push_back({v.real(), v.imag()});
    } else {
        j["witness"] = nullptr;
    }
    j["tol"] = rep.tolerance;
    return j;
}

inline std::string report_to_text(const Report& rep, bool verbose = true) {
    char line[256];
    std::string out;
    std::snprintf(line, sizeof(line), "%s: %s", rep.case_name.c_str(), to_string(rep.verdict));
    out += line;
    if (rep.rank_claim) {
        std::snprintf(line, sizeof(line), " (rank %lld)", static_cast<long long>(*rep.rank_claim));
        out += line;
    }
    std::snprintf(line, sizeof(line), "\n  n=%d  l=%d  reactive=%.1f%%  tol=%g  %.3f ms\n", rep.n_nodes,
                  rep.n_branches, rep.reactive_branch_pct, rep.tolerance, rep.runtime_ms);
    out += line;
    if (verbose) {
        for (const ComponentReport& comp : rep.components) {
            if (comp.root)
                std::snprintf(line, sizeof(line), "  component %d: %s (root bus %ld)\n", comp.id,
                              comp.condition.c_str(), *comp.root);
            else
                std::snprintf(line, sizeof(line), "  component %d: %s\n", comp.id, comp.condition.c_str());
            out += line;
        }
        if (rep.witness) {
            out += "  null-space witness:";
            for (const Complex& v : *rep.witness) {
                std::snprintf(line, sizeof(line), " (%.12g%+.12gj)", v.real(), v.imag());
                out += line;
            }
            out += "\n";
        }
    }
    return out;
}

inline std::string report_csv_header() { return "case,n,l,reactive_pct,verdict,rank,runtime_ms,tol"; }

inline std::string report_to_csv(const Report& rep) {
    char line[256];
    std::string rank = rep.rank_claim ? std::to_string(*rep.rank_claim) : "";
    std::snprintf(line, sizeof(line), "%s,%d,%d,%.1f,%s,%s,%.3f,%g", rep.case_name.c_str(), rep.n_nodes,
                  rep.n_branches, rep.reactive_branch_pct, to_string(rep.verdict), rank.c_str(), rep.runtime_ms,
                  rep.tolerance);
    return line;
}

}  // namespace ybcert
