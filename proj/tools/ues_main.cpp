// ues: experiment runner for distributed measurement-only optimization.
//
//   ues run <config|preset> [--out DIR] [--t-end X] [--omega X]
//                           [--sweep key=v1,v2,...]
//   ues lmi check|search <config|preset> [--out DIR]
//   ues presets
//
// Exit status of `run` is 0 iff every scenario gate passed.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ues/ues.hpp"

namespace {

std::string default_out_root() {
    const char* env = std::getenv("UES_OUT");
    return env && *env ? env : "out";
}

struct SweepRequest {
    std::string key;
    std::vector<double> values;
};

SweepRequest parse_sweep(const std::string& text) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ues::ConfigError("--sweep expects key=v1,v2,...");
    }
    SweepRequest out;
    out.key = text.substr(0, eq);
    std::stringstream ss(text.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.values.push_back(std::stod(item));
    }
    if (out.values.empty()) {
        throw ues::ConfigError("--sweep expects at least one value");
    }
    return out;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += (c == '/' || c == '\\' || c == ' ') ? '_' : c;
    return out;
}

struct RunOutcome {
    std::string label;
    std::string out_dir;
    bool passed = false;
    std::string summary;
};

RunOutcome run_one(const std::string& target, const std::optional<double>& t_end,
                   const std::optional<double>& omega, const std::string& out_dir,
                   const std::optional<std::pair<std::string, double>>& override_kv) {
    ues::ConfigFile cfg = ues::load_config(target);
    if (override_kv) cfg.set_number(override_kv->first, override_kv->second);
    const ues::Scenario sc = ues::parse_scenario(cfg);

    ues::RunOptions opt;
    opt.t_end_override = t_end;
    opt.omega_override = omega;
    opt.out_dir = out_dir;
    const ues::RunArtifacts art = ues::run_scenario(sc, opt);

    RunOutcome out;
    out.label = sc.name + (override_kv ? " [" + override_kv->first + " = " +
                                             std::to_string(override_kv->second) + "]"
                                       : "");
    out.out_dir = out_dir;
    out.passed = art.all_passed;
    std::ostringstream os;
    os << out.label << ": final_error = " << art.report.final_error
       << ", rate_sup = " << art.report.rate_sup
       << ", invariant_drift = " << art.report.invariant_drift << "\n";
    for (const auto& g : art.gates) {
        os << "  " << (g.passed ? "[PASS] " : "[FAIL] ") << g.gate.describe()
           << " (observed " << g.observed << ")\n";
    }
    for (const auto& note : art.notes) os << "  note: " << note << "\n";
    os << "  wrote " << out_dir << "/{trajectory.csv, plot.svg, report.txt, summary.json}\n";
    out.summary = os.str();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed time-varying optimization via measurement-only seeking"};
    app.require_subcommand(1);

    std::string target, out_flag, sweep_flag;
    double t_end_flag = -1.0, omega_flag = -1.0;

    CLI::App* run = app.add_subcommand("run", "simulate a scenario and emit artifacts");
    run->add_option("scenario", target, "config file or preset name")->required();
    run->add_option("--out", out_flag, "output directory");
    run->add_option("--t-end", t_end_flag, "override sim.t_end");
    run->add_option("--omega", omega_flag, "override es.omega");
    run->add_option("--sweep", sweep_flag, "key=v1,v2,... run once per value");

    CLI::App* lmi = app.add_subcommand("lmi", "certificate feasibility tools");
    lmi->require_subcommand(1);
    std::string lmi_target, lmi_out;
    CLI::App* lmi_check = lmi->add_subcommand("check", "check a user-supplied certificate");
    lmi_check->add_option("scenario", lmi_target, "config file or preset name")->required();
    lmi_check->add_option("--out", lmi_out, "output directory");
    CLI::App* lmi_search = lmi->add_subcommand("search", "grid-search for a certificate");
    lmi_search->add_option("scenario", lmi_target, "config file or preset name")->required();
    lmi_search->add_option("--out", lmi_out, "output directory");

    CLI::App* presets = app.add_subcommand("presets", "list built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            for (const auto& name : ues::preset_names()) {
                const ues::Scenario sc =
                    ues::parse_scenario(ues::load_config(name));
                std::cout << name << "  -  " << sc.title << " (t_end " << sc.sim.t_end
                          << ")\n";
            }
            return 0;
        }

        if (run->parsed()) {
            const std::optional<double> t_end =
                t_end_flag > 0 ? std::optional<double>(t_end_flag) : std::nullopt;
            const std::optional<double> omega =
                omega_flag > 0 ? std::optional<double>(omega_flag) : std::nullopt;
            const std::string base_name =
                ues::is_preset(target)
                    ? target
                    : std::filesystem::path(target).stem().string();
            const std::string base_out =
                out_flag.empty() ? default_out_root() + "/" + sanitize(base_name) : out_flag;

            if (sweep_flag.empty()) {
                const RunOutcome out = run_one(target, t_end, omega, base_out, std::nullopt);
                std::cout << out.summary;
                return out.passed ? 0 : 1;
            }

            const SweepRequest sweep = parse_sweep(sweep_flag);
            std::vector<std::future<RunOutcome>> futures;
            for (double v : sweep.values) {
                const std::string dir =
                    base_out + "/" + sanitize(sweep.key) + "=" + std::to_string(v);
                futures.push_back(std::async(std::launch::async, run_one, target, t_end,
                                             omega, dir,
                                             std::make_optional(std::make_pair(sweep.key, v))));
            }
            bool all = true;
            for (auto& f : futures) {
                const RunOutcome out = f.get();
                std::cout << out.summary;
                all = all && out.passed;
            }
            return all ? 0 : 1;
        }

        if (lmi_check->parsed() || lmi_search->parsed()) {
            ues::ConfigFile cfg = ues::load_config(lmi_target);
            const ues::Scenario sc = ues::parse_scenario(cfg);
            const ues::LmiSettings ls =
                ues::parse_lmi_settings(cfg, sc.graph.n(), sc.cost.dim());
            const ues::LmiOutcome out =
                lmi_check->parsed() ? ues::lmi_check(sc, ls) : ues::lmi_search(sc, ls);
            std::cout << ues::lmi_report_text(sc, out);
            if (!lmi_out.empty()) {
                std::filesystem::create_directories(lmi_out);
                std::ofstream tf(lmi_out + "/lmi_report.txt", std::ios::trunc);
                tf << ues::lmi_report_text(sc, out);
                std::ofstream jf(lmi_out + "/lmi_report.json", std::ios::trunc);
                jf << ues::lmi_report_json(sc, out).dump(2) << "\n";
                std::cout << "wrote " << lmi_out << "/{lmi_report.txt, lmi_report.json}\n";
            }
            return out.report.feasible ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
