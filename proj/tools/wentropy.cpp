#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wentropy/commands.hpp"

namespace cmd = wentropy::commands;

namespace {

// Writes to the file named by `path`, or stdout when empty.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw std::runtime_error("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted differential entropies with central-moment weights"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; [scan], [verify], ... sections or scan.key names; flags win");

    // scan
    auto* scan = app.add_subcommand("scan", "Emit a (rho, x3) grid as CSV");
    int example = 1;
    std::string rho = "-0.7:0.7:29", x3 = "-3:3:31", scan_out;
    std::vector<std::string> modes{"paper", "corrected", "wick"};
    scan->add_option("--example", example, "Worked example, 1 or 2")->capture_default_str();
    scan->add_option("--rho", rho, "lo:hi:steps")->capture_default_str();
    scan->add_option("--x3", x3, "lo:hi:steps")->capture_default_str();
    scan->add_option("--modes", modes, "paper, corrected, wick")->delimiter(',')->capture_default_str();
    scan->add_option("-o,--output", scan_out, "Output file (default stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "Run the verification basket; JSON report");
    wentropy::verify::VerifyConfig vcfg;
    std::string verify_out;
    verify->add_option("--tol-quad", vcfg.tol_quad, "Tolerance for closed form vs quadrature")->capture_default_str();
    verify->add_option("--seed", vcfg.seed, "Seed for random matrices, pmfs and Monte Carlo")->capture_default_str();
    verify->add_option("--quad-points", vcfg.quad_points, "Grid points per axis")->capture_default_str()
        ->check(CLI::Range(16, 2048));
    verify->add_option("--quad-sigmas", vcfg.quad_sigmas, "Grid half-width in marginal sds")->capture_default_str()
        ->check(CLI::PositiveNumber);
    verify->add_option("--mc-samples", vcfg.mc_samples, "Monte Carlo samples")->capture_default_str()
        ->check(CLI::Range(1000, 100000000));
    verify->add_option("--pmfs", vcfg.pmf_count, "Random pmfs per identity")->capture_default_str();
    verify->add_option("-o,--output", verify_out, "Report file (default stdout)");

    // moment
    auto* moment = app.add_subcommand("moment", "Gaussian product moment by pair partitions");
    cmd::MomentArgs margs;
    std::string shift;
    moment->add_option("--cov", margs.cov_file, "JSON {\"mean\":[...],\"cov\":[[...]]}")->required();
    moment->add_option("--r", margs.exponents, "Exponents a,b,c")->delimiter(',')->required();
    moment->add_option("--shift", shift, "Shifts d1,d2,d3");

    // wdic
    auto* wdic = app.add_subcommand("wdic", "Weighted deviance information criterion");
    cmd::WdicArgs wargs;
    std::string draws_file, sample, write_draws;
    wdic->add_option("--data", wargs.data_file, "CSV with y_1..y_d,weight")->required();
    auto* draws_opt = wdic->add_option("--draws", draws_file, "CSV with theta_1..theta_p");
    auto* sample_opt = wdic->add_option("--sample", sample, "steps,burn_in,step_size,seed");
    draws_opt->excludes(sample_opt);
    wdic->add_option("--model", wargs.model, "normal or laplace")->capture_default_str();
    wdic->add_option("--model-scale", wargs.model_scale, "Known sd (normal) or scale (laplace); 0 = default");
    wdic->add_option("--weights", wargs.weights, "column, unit or central:a")->capture_default_str();
    wdic->add_option("--theta-hat", wargs.theta_hat, "mean or mode")->capture_default_str();
    wdic->add_option("--prior-sd", wargs.prior_sd, "N(0, sd^2) prior; 0 = flat")->capture_default_str();
    wdic->add_option("--write-draws", write_draws, "Save the draws used");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Write a synthetic scalar dataset as CSV");
    cmd::SimulateArgs sargs;
    std::string sim_out;
    sim->add_option("--model", sargs.model, "normal or laplace")->capture_default_str();
    sim->add_option("--model-scale", sargs.model_scale, "0 = default (unit variance)");
    sim->add_option("--theta", sargs.theta, "Location")->capture_default_str();
    sim->add_option("--n", sargs.n, "Observations")->capture_default_str();
    sim->add_option("--seed", sargs.seed, "Seed")->capture_default_str();
    sim->add_option("--weights", sargs.weights, "unit or central:a")->capture_default_str();
    sim->add_option("-o,--output", sim_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cmd::kOk : cmd::kUsage;
    }

    try {
        if (*scan) {
            wentropy::scan::ScanGrid grid;
            int rc = wentropy::commands::detail::guarded(std::cerr, [&] {
                grid.example = example;
                grid.rho = wentropy::scan::Range::parse(rho, "--rho");
                grid.x3 = wentropy::scan::Range::parse(x3, "--x3");
                grid.modes.clear();
                for (const auto& m : modes) grid.modes.insert(wentropy::scan::parse_mode(m));
                grid.validate();
                return cmd::kOk;
            });
            if (rc != cmd::kOk) return rc;
            Sink sink(scan_out);
            return cmd::cmd_scan(grid, sink.stream(), std::cerr);
        }
        if (*verify) {
            Sink sink(verify_out);
            return cmd::cmd_verify(vcfg, sink.stream(), std::cerr);
        }
        if (*moment) {
            if (!shift.empty()) margs.shift = shift;
            return cmd::cmd_moment(margs, std::cout, std::cerr);
        }
        if (*wdic) {
            if (!draws_file.empty()) wargs.draws_file = draws_file;
            if (!sample.empty()) wargs.sample = sample;
            if (!write_draws.empty()) wargs.write_draws = write_draws;
            return cmd::cmd_wdic(wargs, std::cout, std::cerr);
        }
        if (*sim) {
            Sink sink(sim_out);
            return cmd::cmd_simulate(sargs, sink.stream(), std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cmd::kUsage;
    }
    return cmd::kUsage;
}
