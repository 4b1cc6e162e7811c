// Command-line front end: certify a single case, batch-certify a directory,
// or convert a case to the canonical JSON network schema.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ybcert/ybcert.hpp"

namespace fs = std::filesystem;
using namespace ybcert;

namespace {

struct CaseOutcome {
    std::string file_name;
    bool failed = false;
    std::string error;
    Report report;
};

int verdict_exit_code(Verdict v) {
    switch (v) {
        case Verdict::Invertible: return 0;
        case Verdict::Singular: return 1;
        default: return 2;
    }
}

CaseOutcome run_case(const fs::path& path, const CertifyOptions& opts) {
    CaseOutcome outcome;
    outcome.file_name = path.filename().string();
    try {
        const CaseNetwork cn = load_case_file(path);
        const auto start = std::chrono::steady_clock::now();
        const Certificate cert = certify(cn.net, opts);
        const auto stop = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
        outcome.report = make_report(cn, cert, ms);
    } catch (const std::exception& e) {
        outcome.failed = true;
        outcome.error = e.what();
    }
    return outcome;
}

void run_oracle_check(const fs::path& path, const CaseOutcome& outcome, double tol) {
    if (outcome.failed) return;
    try {
        const CaseNetwork cn = load_case_file(path);
        if (cn.net.node_count() > 2000) {
            std::cerr << "oracle: skipped (network above dense size cap)\n";
            return;
        }
        const RankResult rank = dense_rank(dense_admittance(cn.net), tol);
        if (outcome.report.rank_claim) {
            const bool agree = rank.rank == *outcome.report.rank_claim;
            std::cerr << "oracle: rank " << rank.rank << " vs certificate rank " << *outcome.report.rank_claim
                      << (agree ? " -- agree\n" : " -- DISAGREE\n");
        } else {
            std::cerr << "oracle: rank " << rank.rank << " (certificate makes no definite claim)\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "oracle: failed: " << e.what() << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear-time invertibility certification of bus admittance matrices"};
    app.require_subcommand(1);

    std::string path_arg;
    std::string format = "text";
    double tol = 1e-12;
    bool strict = false;
    int max_root_trials = 0;
    bool with_oracle = false;
    int jobs = 1;
    std::string out_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--tol", tol, "comparison tolerance")->capture_default_str();
        cmd->add_option("--format", format, "output format: text | json | csv")
            ->check(CLI::IsMember({"text", "json", "csv"}));
        cmd->add_flag("--strict-connectivity", strict, "refuse disconnected networks instead of certifying per island");
        cmd->add_option("--max-root-trials", max_root_trials, "cap on root candidates per component (0 = all)");
        cmd->add_flag("--oracle", with_oracle, "cross-check definite verdicts against a dense rank computation");
    };

    CLI::App* cmd_certify = app.add_subcommand("certify", "certify one case file (.m or .json)");
    cmd_certify->add_option("path", path_arg, "case file")->required();
    add_common(cmd_certify);

    CLI::App* cmd_batch = app.add_subcommand("batch", "certify every case file in a directory");
    cmd_batch->add_option("dir", path_arg, "directory of case files")->required();
    add_common(cmd_batch);
    cmd_batch->add_option("--jobs", jobs, "parallel workers (0 = hardware)");

    CLI::App* cmd_convert = app.add_subcommand("convert", "convert a case to the canonical JSON network schema");
    cmd_convert->add_option("path", path_arg, "case file")->required();
    cmd_convert->add_option("-o,--output", out_path, "output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    const CertifyOptions opts{tol, strict, max_root_trials};

    if (cmd_certify->parsed()) {
        const fs::path path(path_arg);
        const CaseOutcome outcome = run_case(path, opts);
        if (outcome.failed) {
            std::cerr << "error: " << outcome.error << "\n";
            return 3;
        }
        if (format == "json")
            std::cout << report_to_json(outcome.report).dump(2) << "\n";
        else if (format == "csv")
            std::cout << report_csv_header() << "\n" << report_to_csv(outcome.report) << "\n";
        else
            std::cout << report_to_text(outcome.report);
        if (with_oracle) run_oracle_check(path, outcome, tol);
        return verdict_exit_code(outcome.report.verdict);
    }

    if (cmd_batch->parsed()) {
        const fs::path dir(path_arg);
        if (!fs::is_directory(dir)) {
            std::cerr << "error: '" << dir.string() << "' is not a directory\n";
            return 3;
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string ext = entry.path().extension().string();
            if (ext == ".m" || ext == ".json") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end(),
                  [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

        std::vector<CaseOutcome> outcomes(files.size());
        unsigned workers = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : static_cast<unsigned>(jobs);
        workers = std::min<unsigned>(std::max(1u, workers), files.size() == 0 ? 1u : static_cast<unsigned>(files.size()));
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1))
                    outcomes[i] = run_case(files[i], opts);
            });
        for (std::thread& t : pool) t.join();

        int invertible = 0, singular = 0, inconclusive = 0, errors = 0;
        for (const CaseOutcome& o : outcomes) {
            if (o.failed)
                ++errors;
            else if (o.report.verdict == Verdict::Invertible)
                ++invertible;
            else if (o.report.verdict == Verdict::Singular)
                ++singular;
            else
                ++inconclusive;
        }

        if (format == "json") {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (const CaseOutcome& o : outcomes) {
                if (o.failed)
                    arr.push_back({{"case", o.file_name}, {"error", o.error}});
                else
                    arr.push_back(report_to_json(o.report));
            }
            std::cout << arr.dump(2) << "\n";
        } else if (format == "csv") {
            std::cout << report_csv_header() << "\n";
            for (const CaseOutcome& o : outcomes) {
                if (o.failed)
                    std::cout << o.file_name << ",,,,ERROR,,," << "\n";
                else
                    std::cout << report_to_csv(o.report) << "\n";
            }
        } else {
            for (std::size_t i = 0; i < outcomes.size(); ++i) {
                const CaseOutcome& o = outcomes[i];
                if (o.failed)
                    std::cout << o.file_name << ": ERROR " << o.error << "\n";
                else
                    std::cout << report_to_text(o.report, false);
                if (with_oracle) run_oracle_check(files[i], o, tol);
            }
            std::cout << outcomes.size() << " case(s): " << invertible << " invertible, " << singular << " singular, "
                      << inconclusive << " inconclusive, " << errors << " error(s)\n";
        }
        return 0;
    }

    // convert
    try {
        const CaseNetwork cn = load_case_file(fs::path(path_arg));
        const nlohmann::ordered_json j = nlohmann::ordered_json(network_to_json(cn.net));
        if (out_path.empty()) {
            std::cout << j.dump(2) << "\n";
        } else {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "error: cannot write '" << out_path << "'\n";
                return 3;
            }
            out << j.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
