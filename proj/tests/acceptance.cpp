// One line per acceptance criterion; nonzero exit if any is red.
#include "tnoise/commands.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace tnoise;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what)
{
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

std::string num(double v)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

void c1_covariance()
{
    double worst = 0;
    for (int N : {1, 2, 3})
        for (double g : {0.0, 1.0, 2.0}) {
            const CovarianceCheck cc = check_covariance(theta_shell(N, g));
            worst = std::max(worst, cc.max_deviation / cc.l2_sq);
        }
    report(1, worst <= 1e-12, "max |sum theta^2 sigma(x)sigma - (2/3)|theta|^2 I| / |theta|^2 = " + num(worst) + " (<= 1e-12)");
}

void c2_oracle()
{
    const ThetaWeights th = theta_shell(2, 1);
    const Corrector S(th, 1.0, 4);
    double worst = 0;
    for (int s = 0; s < 20; ++s) {
        Rng rng(2000, s);
        const auto xi = random_real_field(4, rng);
        const auto d = s_theta_direct(th, 1.0, xi);
        worst = std::max(worst, l2_norm(d - S.apply(xi)) / l2_norm(d));
    }
    report(2, worst <= 1e-10, "direct vs block corrector, 20 fields M=4 shell(2,1): max rel err " + num(worst) + " (<= 1e-10)");
}

const std::vector<int> ladder{4, 8, 16, 32};
const IVec3 l100{1, 0, 0};

void c3_defect()
{
    std::vector<double> d;
    for (int N : ladder)
        d.push_back(limit_defect(N, 1.0, 1.0, l100, 1));
    const TrendResult t = trend(ladder, d, 0.7);
    const bool slope_ok = t.slope >= -1.3 && t.slope <= -0.7;
    report(3, t.strictly_decreasing && t.ratio_ok && slope_ok,
           "defect N=4..32: " + num(d[0]) + " " + num(d[1]) + " " + num(d[2]) + " " + num(d[3]) +
               "; decreasing=" + (t.strictly_decreasing ? "yes" : "no") + ", worst ratio " + num(t.worst_ratio) +
               " (<= 0.7), slope " + num(t.slope) + " (want -1 +- 0.3); baseline N=32 " + num(d[3]));
}

void c4_angular()
{
    std::vector<double> e;
    double orth_excess = -1;
    for (int N : ladder) {
        const AngularSumError a = angular_sum_error(angular_sum(N, 1.0, l100, 1), l100, 1);
        e.push_back(a.total);
        orth_excess = std::max(orth_excess, a.orthogonal - 10 * a.parallel);
    }
    const TrendResult t = trend(ladder, e, 0.7);
    report(4, t.strictly_decreasing && t.ratio_ok && orth_excess <= 0,
           "|J_N - (4/15)a|: " + num(e[0]) + " " + num(e[1]) + " " + num(e[2]) + " " + num(e[3]) + "; worst ratio " +
               num(t.worst_ratio) + " (<= 0.7); max(orth - 10 par) " + num(orth_excess) + " (<= 0)");
}

void c5_heuristic()
{
    const ThetaWeights th = theta_shell(32, 1);
    const double nu = 1.0;
    // <S_perp v, v> for v = sigma_{l,1} + sigma_{l,2}, evaluated through the field operator
    const SpectralField v = sigma_mode(2, l100, 1) + sigma_mode(2, l100, 2);
    const double q = inner(v, s_theta_perp_apply(th, nu, v)).real() / (pi * pi * nu * l100.norm_sq());
    const double rel = std::abs(q / (-16.0 / 5.0) - 1);
    report(5, rel <= 0.05, "<S_perp v, v>/(pi^2 nu |l|^2) at N=32: " + num(q) + ", rel dev from -16/5 " + num(rel) + " (<= 0.05)");
}

struct EnergyRun
{
    PathDiagnostics d;
    bool failed = false;
    std::vector<double> excess;   // per step
};

std::vector<EnergyRun> energy_paths(std::uint64_t seed, int samples, int M, int N, double nu, double R, double R0)
{
    const ThetaWeights th = theta_shell(N, 1);
    StepParams p;
    p.dt = 1e-3;
    p.nu = nu;
    p.R = R;
    auto prop = std::make_shared<const LinearPropagator>(th, p, M);
    std::vector<EnergyRun> out(samples);
    Integrator integ(th, p, M, prop);
    for (int s = 0; s < samples; ++s) {
        const NoiseDriver probe(th, M, seed, s);
        EnergyRun& r = out[s];
        const auto obs = path_diagnostics(r.d, probe.active(), p.dt, 1, &r.excess);
        const auto ts = simulate_path(integ, th, initial_condition(M, seed, s, 2, R0), 1.0, seed, s, obs);
        r.failed = ts.failed;
    }
    return out;
}

void c6_energy()
{
    // calibrate the run constant on independent paths, then test on fresh ones
    double C_hat = 0;
    for (const auto& r : energy_paths(61, 2, 6, 3, 1.0, 10, 5))
        C_hat = std::max(C_hat, r.d.max_excess_rate);
    const auto runs = energy_paths(60, 3, 6, 2, 1.0, 10, 5);
    double bracket = 0, slack = -1e300;
    bool failed = false;
    for (const auto& r : runs) {
        failed |= r.failed || r.excess.size() != 1001;
        bracket = std::max(bracket, r.d.max_bracket_ratio);
        for (std::size_t n = 1; n < r.excess.size(); ++n)
            slack = std::max(slack, r.excess[n] - C_hat * n * 1e-3);
    }
    report(6, !failed && bracket <= 1e-12 && slack <= 0,
           "3 paths M=6, 1000 steps: max |<xi, Pi(sigma.grad xi)>|/(|xi|^2|k|) " + num(bracket) +
               " (<= 1e-12); a-priori bound with C=" + num(C_hat) + ": max excess - C t " + num(slack) + " (<= 0)");
}

void c7_dissipative()
{
    double worst_q = -1e300, worst_sym = 0;
    for (const auto& th : {theta_shell(2, 1), theta_shell(3, 0), theta_ball(3, 1)}) {
        const Corrector S(th, 2.0, 5);
        for (int s = 0; s < 10; ++s) {
            Rng rng(700, s);
            const auto xi = random_real_field(5, rng);
            const auto u = random_complex_field(5, rng), w = random_complex_field(5, rng);
            worst_q = std::max(worst_q, inner(xi, S.apply(xi)).real());
            worst_sym = std::max(worst_sym, std::abs(inner(S.apply(u), w) - inner(u, S.apply(w))) /
                                                (l2_norm(u) * l2_norm(w)));
        }
    }
    report(7, worst_q <= 0 && worst_sym <= 1e-11,
           "max <xi, S xi> = " + num(worst_q) + " (<= 0); max symmetry defect " + num(worst_sym) + " (<= 1e-11)");
}

void c8_scaling()
{
    ScalingConfig c;   // M=6, nu=5, R=1e3, T=0.5, dt=1e-3, 20 samples, N in {4, 16}
    c.threads = int(std::max(1u, std::thread::hardware_concurrency()));
    const ScalingReport rep = scaling_limit_experiment(c);
    const auto checks = scaling_checks(rep, 0.75);
    bool ok = true;
    std::string msg;
    for (const auto& ch : checks) {
        ok &= ch.pass;
        msg += ch.name + " " + num(ch.value) + "; ";
    }
    msg += "medians " + num(rep.ladder.front().l2_median) + " -> " + num(rep.ladder.back().l2_median) +
           ", survival " + num(rep.ladder.front().survival_fraction) + " -> " + num(rep.ladder.back().survival_fraction);
    report(8, ok, msg);
}

void c9_decay()
{
    const double r0 = small_data_radius(1.0);
    const auto xi0 = initial_condition(6, 1, 0, 2, 0.5 * r0);
    const DecayReport d = decay_check(xi0, 1.0, 0.5, 1e-3, 1.0);
    report(9, !d.failed && d.min_margin_small >= 0,
           "|xi0| = " + num(d.norm0) + " = r0/2; min(2^{1/4}|xi0|e^{-2 pi^2 t} - |xi(t)|) = " + num(d.min_margin_small) + " (>= 0)");
}

void c10_stretching()
{
    double worst = 0;
    for (const auto& th : {theta_shell(1, 1), theta_shell(2, 1), theta_shell(3, 0), theta_shell(2, 2)})
        for (int s = 0; s < 5; ++s) {
            Rng rng(1000, s);
            const EnergyJ j = advection_energy_J(th, 0.7, random_real_field(4, rng));
            worst = std::max(worst, std::abs(j.lhs - j.rhs) / j.rhs);
        }
    double margin = 1e300;
    for (int N : {2, 4, 8}) {
        const ThetaNorms tn = theta_norms(theta_shell(N, 1));
        margin = std::min(margin, tn.h1_sq / tn.l2_sq - N * N);
    }
    report(10, worst <= 1e-10 && margin >= 0,
           "stretching energy lhs/rhs rel err " + num(worst) + " (<= 1e-10); min h1^2/l2^2 - N^2 = " + num(margin) + " (>= 0)");
}

std::map<std::string, std::string> csv_bodies(const fs::path& root)
{
    std::map<std::string, std::string> m;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.path().extension() == ".csv") {
            std::ifstream in(e.path(), std::ios::binary);
            std::ostringstream s;
            s << in.rdbuf();
            m[fs::relative(e.path(), root).string()] = s.str();
        }
    return m;
}

void c11_reproducible()
{
    std::vector<std::pair<std::string, Config>> jobs;
    Config vi;
    vi.M = 4;
    vi.N = {1, 2, 3};
    vi.gamma = {0, 1, 2};
    vi.samples = 2;
    jobs.push_back({"verify-identities", vi});
    Config cl;
    cl.N = {4, 8, 16};
    jobs.push_back({"corrector-limit", cl});
    Config sim;
    sim.M = 4;
    sim.N = {2};
    sim.T = 0.1;
    sim.samples = 2;
    sim.nu = 1;
    sim.R = 10;
    jobs.push_back({"simulate", sim});
    Config sc;
    sc.M = 4;
    sc.N = {2, 4};
    sc.T = 0.1;
    sc.samples = 3;
    jobs.push_back({"scaling-limit", sc});
    Config dc;
    dc.T = 0.2;
    jobs.push_back({"decay", dc});

    const auto& cmds = subcommands();
    const fs::path base = fs::temp_directory_path() / ("tnoise_acceptance_" + std::to_string(::getpid()));
    std::array<std::map<std::string, std::string>, 2> bodies;
    for (int rep = 0; rep < 2; ++rep) {
        const fs::path root = base / std::to_string(rep);
        fs::remove_all(root);
        for (auto [name, c] : jobs) {
            c.output.root = root.string();
            c.output.name = name;
            cmds.at(name)(c);
        }
        bodies[rep] = csv_bodies(root);
    }
    fs::remove_all(base);
    const bool ok = !bodies[0].empty() && bodies[0] == bodies[1];
    report(11, ok, std::to_string(bodies[0].size()) + " CSV files from " + std::to_string(jobs.size()) +
                       " subcommands, two runs: " + (ok ? "byte-identical" : "differ"));
}

} // namespace

int main()
{
    ::unsetenv("TNOISE_OUTPUT_ROOT");
    c1_covariance();
    c2_oracle();
    c3_defect();
    c4_angular();
    c5_heuristic();
    c6_energy();
    c7_dissipative();
    c8_scaling();
    c9_decay();
    c10_stretching();
    c11_reproducible();
    std::printf("%d of 11 criteria failed\n", failures);
    return failures ? 1 : 0;
}
