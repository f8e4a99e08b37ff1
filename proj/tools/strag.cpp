// strag: build encoding plans for coded sparse matrix computation schemes,
// evaluate their straggler metrics, simulate heterogeneous workers, verify
// decode end to end, and regenerate the comparison tables as CSV.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "strag/experiments.hpp"
#include "strag/metrics.hpp"
#include "strag/tables.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRegime = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitDecode = 4;
constexpr int kExitBudget = 5;

nlohmann::json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw strag::parameter_error("cannot open config: " + path);
    nlohmann::json j;
    f >> j;
    return j;
}

// Output files appear atomically: written to a sibling temp file, then renamed.
void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp);
        if (!f) throw strag::parameter_error("cannot open for writing: " + tmp);
        f << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw strag::parameter_error("cannot move output into place: " + path);
}

strag::SchemeConfig scheme_from_config(const nlohmann::json& j, std::optional<std::uint64_t> seed) {
    const nlohmann::json& js = j.contains("scheme") && j.at("scheme").is_object() ? j.at("scheme") : j;
    strag::SchemeConfig cfg = strag::scheme_config_from_json(js);
    if (seed) cfg.seed = *seed;
    return cfg;
}

int cmd_plan(const std::string& config_path, const std::string& out,
             std::optional<std::uint64_t> seed) {
    strag::SchemeConfig cfg = scheme_from_config(load_json(config_path), seed);
    strag::EncodingPlan plan = strag::build_plan(cfg);
    std::ostringstream summary;
    summary << "scheme=" << plan.scheme_id << " n=" << plan.n << " delta_a=" << plan.delta_a
            << " delta_b=" << plan.delta_b << " ell=" << plan.ell() << "\n";
    for (long i = 0; i < plan.n; ++i) {
        summary << "worker " << i << ":";
        for (long t = 0; t < plan.ell(); ++t) {
            strag::Task task = plan.task(i, t);
            summary << " {";
            for (size_t k = 0; k < task.a->support.size(); ++k)
                summary << (k ? "," : "") << task.a->support[k];
            summary << "}";
            if (task.b != nullptr) {
                summary << "x{";
                for (size_t k = 0; k < task.b->support.size(); ++k)
                    summary << (k ? "," : "") << task.b->support[k];
                summary << "}";
            }
        }
        summary << "\n";
    }
    std::cerr << summary.str();
    write_output(out, strag::plan_to_json(plan).dump(2) + "\n");
    return kExitOk;
}

int cmd_metrics(const std::string& config_path, const std::string& out, bool analytic, bool oracle,
                bool kappa, long long budget, std::optional<std::uint64_t> seed) {
    nlohmann::json j = load_json(config_path);
    std::vector<strag::SchemeConfig> configs;
    if (j.contains("configs")) {
        for (const auto& jc : j.at("configs")) configs.push_back(scheme_from_config(jc, seed));
    } else if (!j.empty()) {
        configs.push_back(scheme_from_config(j, seed));
    }
    strag::MetricsRequest req;
    req.analytic = analytic || !oracle;  // default to analytic when nothing was asked
    req.oracle = oracle;
    req.kappa = kappa;
    req.budget = budget;
    // Regime validation happens before any oracle work.
    for (const auto& cfg : configs) strag::analytic_metrics(cfg);

    std::ostringstream csv;
    csv << strag::metrics_csv_header() << ",status\n";
    bool budget_hit = false;
    for (const auto& cfg : configs) {
        std::string status = "ok";
        strag::SchemeMetrics m;
        try {
            m = strag::compute_metrics(cfg, req);
        } catch (const strag::budget_error& e) {
            budget_hit = true;
            status = std::string("budget-exceeded: ") + e.what();
            strag::MetricsRequest fallback = req;
            fallback.oracle = false;
            fallback.kappa = false;
            m = strag::compute_metrics(cfg, fallback);
        }
        csv << strag::metrics_csv_row(cfg, m) << "," << strag::csv_escape(status) << "\n";
    }
    write_output(out, csv.str());
    return budget_hit ? kExitBudget : kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out, bool kappa,
                 long long budget, std::optional<std::uint64_t> seed) {
    nlohmann::json j = load_json(config_path);
    const long trials = j.value("trials", 1L);
    strag::SpeedModel speed =
        j.contains("speed") ? strag::speed_model_from_json(j.at("speed")) : strag::SpeedModel{};
    std::uint64_t base_seed = seed ? *seed : j.value("seed", 0ULL);
    std::ostringstream csv;
    csv << strag::compare_csv_header() << "\n";
    for (const auto& js : j.at("schemes")) {
        strag::CompareEntry entry;
        entry.label = js.value("label", std::string());
        entry.scheme = strag::scheme_config_from_json(js.at("scheme"));
        if (js.contains("matrix")) entry.matrix = strag::matrix_spec_from_json(js.at("matrix"));
        if (js.contains("expectation")) {
            strag::MatrixSpec ms = strag::matrix_spec_from_json(js.at("expectation"));
            entry.expectation =
                strag::ExpectationParams{ms.rows, ms.cols_a, ms.sigma_a, ms.cols_b, ms.sigma_b};
        }
        strag::CompareRow row = strag::compare_one(entry, trials, speed, base_seed, kappa, budget);
        csv << strag::compare_csv_row(row) << "\n";
    }
    write_output(out, csv.str());
    return kExitOk;
}

int cmd_e2e(const std::string& config_path, std::optional<std::uint64_t> seed) {
    nlohmann::json j = load_json(config_path);
    strag::E2EConfig cfg;
    cfg.scheme = strag::scheme_config_from_json(j.at("scheme"));
    cfg.matrix = strag::matrix_spec_from_json(j.at("matrix"));
    cfg.random_states = j.value("random_states", 20L);
    cfg.tolerance = j.value("tolerance", 1e-6);
    cfg.seed = seed ? *seed : j.value("seed", 0ULL);
    strag::E2EReport report = strag::run_e2e(cfg);
    for (const auto& c : report.cases) {
        std::cout << (c.pass ? "pass" : "FAIL") << " " << c.label << " rel_error=" << c.rel_error
                  << " kappa=" << c.kappa << " residual=" << c.residual << "\n";
    }
    std::cout << (report.pass ? "PASS" : "FAIL") << " max_rel_error=" << report.max_rel_error
              << "\n";
    return report.pass ? kExitOk : kExitDecode;
}

int cmd_table(const std::string& id, const std::string& out, bool kappa, long long budget) {
    strag::TableSpec spec = strag::table_by_id(id);
    std::ostringstream csv;
    csv << strag::table_csv_header() << "\n";
    for (const auto& row : strag::run_table(spec, kappa, budget))
        csv << strag::table_csv_row(row) << "\n";
    write_output(out, csv.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coded sparse matrix computation schemes: plans, metrics, simulation"};
    app.require_subcommand(1);

    std::string config_path, out_path, table_id;
    bool flag_oracle = false, flag_analytic = false, flag_kappa = false;
    long long budget = 10'000'000;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_value = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "JSON configuration file");
        if (needs_config) opt->required();
        cmd->add_option("--out", out_path, "output file (stdout when omitted)");
        cmd->add_option("--budget", budget, "oracle enumeration budget");
        cmd->add_flag("--oracle", flag_oracle, "run brute-force oracles");
        cmd->add_flag("--analytic", flag_analytic, "report closed-form metrics");
        cmd->add_flag("--kappa", flag_kappa, "search worst-case condition numbers");
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t& v) { seed_value = v; seed_set = true; },
            "override config seeds");
    };

    auto* plan = app.add_subcommand("plan", "build an encoding plan and write it as JSON");
    add_common(plan, true);
    auto* metrics = app.add_subcommand("metrics", "straggler resilience and Q metrics as CSV");
    add_common(metrics, true);
    auto* simulate = app.add_subcommand("simulate", "event-driven worker simulation as CSV");
    add_common(simulate, true);
    auto* e2e = app.add_subcommand("e2e", "end-to-end encode/decode verification");
    add_common(e2e, true);
    auto* table = app.add_subcommand("table", "regenerate a comparison table as CSV");
    add_common(table, false);
    table->add_option("--id", table_id, "table id: III, IV-desk, V, VI-desk, VII-desk")->required();

    CLI11_PARSE(app, argc, argv);
    if (seed_set) seed = seed_value;

    try {
        if (plan->parsed()) return cmd_plan(config_path, out_path, seed);
        if (metrics->parsed())
            return cmd_metrics(config_path, out_path, flag_analytic, flag_oracle, flag_kappa,
                               budget, seed);
        if (simulate->parsed()) return cmd_simulate(config_path, out_path, flag_kappa, budget, seed);
        if (e2e->parsed()) return cmd_e2e(config_path, seed);
        if (table->parsed()) return cmd_table(table_id, out_path, flag_kappa, budget);
    } catch (const strag::mismatch_error& e) {
        std::cerr << "mismatch: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const strag::decode_error& e) {
        std::cerr << "decode failure: " << e.what() << " kappa=" << e.kappa
                  << " residual=" << e.residual << "\n";
        return kExitDecode;
    } catch (const strag::budget_error& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRegime;
    }
    return kExitOk;
}
