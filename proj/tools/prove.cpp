// prove: plan, execute and certify uniqueness of the first N+1 bound states.
//
// Exit codes: 0 proved, 1 failed (certificate still written), 2 planning
// failure, 3 cover gap.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rprove/rprove.hpp"

namespace {

enum Exit { kProved = 0, kFailed = 1, kPlanning = 2, kCoverGap = 3 };

nlohmann::json read_json(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw rprove::Error("cannot open " + path);
    }
    return nlohmann::json::parse(is);
}

void write_json(const nlohmann::json& j, const std::string& path)
{
    std::ofstream os(path);
    if (!os) {
        throw rprove::Error("cannot open " + path);
    }
    os << j.dump(1) << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Computer-assisted proof of uniqueness of excited states of y'' + (2/t) y' + y^3 - y = 0"};
    int n = 0;
    std::string plan_out, plan_in, cert_out, plot_data, recheck;
    bool table = false;
    std::size_t order = 15;
    double t0 = 0.1;
    unsigned threads = 1;
    int max_depth = 60;
    app.add_option("--n", n, "Highest excited-state index N (states 0..N)")->check(CLI::NonNegativeNumber);
    app.add_option("--plan-out", plan_out, "Write the plan as JSON");
    app.add_option("--plan-in", plan_in, "Read the plan from JSON instead of planning")->check(CLI::ExistingFile);
    app.add_option("--cert-out", cert_out, "Write the proof certificate as JSON");
    app.add_flag("--table", table, "Print the result table");
    app.add_option("--plot-data", plot_data, "Write (b, limit, band) CSV");
    app.add_option("--taylor-order", order, "Taylor order of the integrator")->check(CLI::Range(2, 40));
    app.add_option("--t0", t0, "Nominal start time; the start interval is [t0, t0 + 0.001]")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 256));
    app.add_option("--max-depth", max_depth, "Maximum bisection depth")->check(CLI::NonNegativeNumber);
    app.add_option("--recheck", recheck, "Re-validate a certificate file and exit")->check(CLI::ExistingFile);
    CLI11_PARSE(app, argc, argv);

    if (!recheck.empty()) {
        const auto problems = rprove::recheck_certificate(read_json(recheck));
        for (const auto& p : problems) {
            std::cerr << "recheck: " << p << '\n';
        }
        std::cout << (problems.empty() ? "certificate valid\n" : "certificate INVALID\n");
        return problems.empty() ? kProved : kFailed;
    }

    rprove::MethodConfig cfg;
    cfg.integrator.order = order;
    cfg.t0 = rprove::Interval(t0, t0 + 0.001);
    cfg.max_depth = max_depth;

    const auto start = std::chrono::steady_clock::now();
    rprove::ProofPlan plan;
    try {
        if (!plan_in.empty()) {
            plan = rprove::plan_from_json(read_json(plan_in));
            n = plan.n_states;
        } else {
            std::cerr << "planning N=" << n << " ...\n";
            plan = rprove::build_plan(n, cfg);
        }
        if (!plan_out.empty()) {
            write_json(rprove::to_json(plan), plan_out);
        }
    } catch (const rprove::PlanningFailure& e) {
        std::cerr << "planning failure: " << e.what() << '\n';
        return kPlanning;
    } catch (const rprove::OracleAmbiguous& e) {
        std::cerr << "planning failure: " << e.what() << '\n';
        return kPlanning;
    } catch (const std::exception& e) {
        std::cerr << "cannot load plan: " << e.what() << '\n';
        return kPlanning;
    }

    rprove::ProofCertificate cert;
    try {
        std::cerr << "executing " << plan.segments.size() + 1 << " segments ...\n";
        cert = rprove::execute(plan, cfg, threads);
    } catch (const rprove::CoverGap& e) {
        std::cerr << "cover gap at segment " << e.position() << ": " << e.what() << '\n';
        return kCoverGap;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    try {
        if (!cert_out.empty()) {
            rprove::emit_certificate(cert, cert_out);
        }
        if (table) {
            std::cout << rprove::emit_table(cert);
        }
        if (!plot_data.empty()) {
            rprove::emit_plot_data(cert, plot_data);
        }
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kFailed;
    }

    for (const auto& c : cert.conclusions) {
        std::cout << "state " << c.state << ": " << (c.unique ? "unique in " : "NOT established, interval ")
                  << c.interval << '\n';
    }
    for (const auto& f : cert.failures) {
        std::cerr << "failed: " << f << '\n';
    }
    std::cout << (cert.proved ? "PROVED" : "FAILED") << " in " << secs << " s\n";
    return cert.proved ? kProved : kFailed;
}
