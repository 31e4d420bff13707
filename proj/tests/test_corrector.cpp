#include "tnoise/corrector.hpp"

#include <gtest/gtest.h>

using namespace tnoise;

namespace {

double rel(const SpectralField& a, const SpectralField& b) { return l2_norm(a - b) / std::max(l2_norm(b), 1e-300); }

ThetaWeights unit_shell()
{
    ThetaWeights th;
    th.support = lattice_points(1, 1);
    th.weight.assign(th.support.size(), 1.0);
    return th;
}

// naive oracle: sin^2 through |k x l|^2, plain summation
Vec3 naive_angular_sum(int N, double gamma, IVec3 l, int beta)
{
    const Vec3 a = frame(l)[beta - 1];
    const Vec3 lv = l.vec();
    Vec3 s;
    double l2 = 0;
    for (int x = -2 * N; x <= 2 * N; ++x)
        for (int y = -2 * N; y <= 2 * N; ++y)
            for (int z = -2 * N; z <= 2 * N; ++z) {
                const int n = x * x + y * y + z * z;
                if (n < N * N || n > 4 * N * N)
                    continue;
                const Vec3 k{double(x), double(y), double(z)};
                const double w2 = std::pow(double(n), -gamma);
                l2 += w2;
                if (norm(k - lv) == 0)
                    continue;
                const double sin2 = dot(cross(k, lv), cross(k, lv)) / (n * dot(lv, lv));
                const Vec3 d = k - lv;
                s += (w2 * sin2 * dot(a, d) / dot(d, d)) * d;
            }
    return s / l2;
}

} // namespace

TEST(Covariance, UnitShellIsFourIdentity)
{
    const Mat3 c = coefficient_covariance(unit_shell());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_NEAR(c[i][j], i == j ? 4.0 : 0.0, 1e-15);
}

TEST(Covariance, KeyIdentityOnShells)
{
    for (int N : {1, 2, 3, 5})
        for (double g : {0.0, 1.0, 2.0, 0.3}) {
            const CovarianceCheck cc = check_covariance(theta_shell(N, g));
            EXPECT_LE(cc.max_deviation, 1e-12 * cc.l2_sq);
            EXPECT_LE(cc.max_offdiag, 1e-13 * cc.l2_sq);
        }
}

TEST(Covariance, ScaledToViscosity)
{
    const double nu = 2.5;
    const ThetaWeights th = theta_shell(2, 1);
    const Mat3 c = coefficient_covariance(th);
    const double s = std::pow(std::sqrt(1.5 * nu), 2) / theta_norms(th).l2_sq;
    for (int i = 0; i < 3; ++i)
        EXPECT_NEAR(s * c[i][i], nu, 1e-13);
}

TEST(Covariance, NonRadialWeightsBreakIdentity)
{
    ThetaWeights th = unit_shell();
    th.weight[0] = th.weight[th.size() - 1] = 3.0;   // +-(the first lexicographic point)
    EXPECT_FALSE(th.radially_symmetric());
    EXPECT_GT(check_covariance(th).max_deviation, 1e-3);
}

TEST(Corrector, BlocksAreSymmetricAndMirrored)
{
    const ThetaWeights th = theta_shell(2, 1);
    const Corrector S(th, 1.7, 4);
    const auto& ms = *ModeSet::get(4);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const Block2& b = S.perp_block(i);
        EXPECT_LE(b.asymmetry(), 1e-12 * (std::abs(b.m[0][0]) + std::abs(b.m[1][1]) + 1e-300));
        const Block2 direct = perp_block(th, theta_norms(th).l2_sq, 1.7, ms.mode(ms.neg(i)), PerpForm::frame_sum);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                EXPECT_NEAR(b.m[r][c], direct.m[r][c], 1e-12 * std::abs(direct.m[r][r]) + 1e-300);
    }
}

TEST(Corrector, DirectOracleAgreement)
{
    const ThetaWeights th = theta_shell(2, 1);
    Rng rng(101);
    for (int s = 0; s < 5; ++s) {
        const auto xi = random_real_field(4, rng);
        EXPECT_LE(rel(s_theta_direct(th, 0.8, xi), s_theta_apply(th, 0.8, xi)), 1e-10);
        EXPECT_LE(rel(s_theta_perp_apply(th, 0.8, xi, PerpForm::sine_squared), s_theta_perp_apply(th, 0.8, xi)), 1e-12);
    }
    EXPECT_THROW(s_theta_direct(th, 1, random_real_field(4, rng), true, 6), std::domain_error);
}

TEST(Corrector, DroppingInnerProjectionGivesLaplacian)
{
    Rng rng(103);
    const auto xi = random_real_field(3, rng);
    for (const auto& th : {theta_shell(1, 0), theta_shell(2, 2), theta_ball(3, 1)})
        EXPECT_LE(rel(s_theta_direct(th, 1.3, xi, false), 1.3 * laplacian(xi)), 1e-12);
}

TEST(Corrector, BlockDiagonal)
{
    const ThetaWeights th = theta_shell(1, 1);
    const IVec3 l{1, 1, 0};
    const auto v = sigma_mode(3, l, 2);
    const auto out = s_theta_direct(th, 1.0, v);
    EXPECT_GT(norm(out.at(l)), 0);
    EXPECT_LE(l2_norm(out) - norm(out.at(l)), 1e-13 * norm(out.at(l)));
}

TEST(Corrector, ZeroAndBounds)
{
    const ThetaWeights th = theta_shell(3, 1);
    EXPECT_EQ(l2_norm(s_theta_apply(th, 2.0, SpectralField(4))), 0);
    EXPECT_EQ(l2_norm(s_theta_perp_apply(th, 2.0, SpectralField(4))), 0);
    const double nu = 2.0;
    for (IVec3 l : lattice_points(1, 16))
        for (int j = 1; j <= 2; ++j) {
            const double n = l2_norm(s_theta_apply(th, nu, sigma_mode(4, l, j)));
            EXPECT_LE(n, 10 * pi * pi * nu * l.norm_sq());
        }
}

TEST(Corrector, DissipationEqualsNoiseSumOfSquares)
{
    Rng rng(107);
    for (const auto& th : {theta_shell(1, 1), theta_shell(2, 0)}) {
        const double nu = 0.9;
        const auto xi = random_real_field(4, rng);
        const double q = inner(xi, s_theta_apply(th, nu, xi)).real();
        EXPECT_LE(q, 0);
        const double sos = transport_sum_of_squares(th, xi);
        EXPECT_NEAR(2 * q, -3 * nu / theta_norms(th).l2_sq * sos, 1e-10 * std::abs(q));
    }
}

TEST(Corrector, SymmetricOnComplexFields)
{
    Rng rng(109);
    const ThetaWeights th = theta_shell(2, 1);
    const Corrector S(th, 3.0, 5);
    for (int s = 0; s < 4; ++s) {
        const auto u = random_complex_field(5, rng), w = random_complex_field(5, rng);
        EXPECT_LE(std::abs(inner(S.apply(u), w) - inner(u, S.apply(w))), 1e-11 * l2_norm(u) * l2_norm(w));
    }
}

TEST(LimitDefect, IndependentOfViscosity)
{
    for (int N : {4, 8})
        EXPECT_NEAR(limit_defect(N, 1, 1, {1, 0, 0}, 1), limit_defect(N, 1, 7, {1, 0, 0}, 1), 1e-14);
}

TEST(LimitDefect, DecreasesAndMatchesBaseline)
{
    double prev = 1e9;
    for (int N : {4, 8, 16, 32}) {
        const double d = limit_defect(N, 1, 1, {1, 0, 0}, 1);
        EXPECT_LT(d, prev);
        prev = d;
    }
    EXPECT_LE(prev, 0.2);
    // regression baseline recorded on first build
    EXPECT_NEAR(prev, 1.061556e-4, 1e-9);
}

TEST(AngularSum, MatchesNaiveOracle)
{
    for (IVec3 l : {IVec3{1, 0, 0}, IVec3{1, 2, 0}, IVec3{0, 1, 1}})
        for (int beta = 1; beta <= 2; ++beta) {
            const Vec3 a = angular_sum(5, 1.0, l, beta);
            const Vec3 b = naive_angular_sum(5, 1.0, l, beta);
            EXPECT_LE(norm(a - b), 1e-13);
        }
}

TEST(AngularSum, ApproachesFourFifteenths)
{
    const IVec3 l{1, 2, 0};
    double prev = 1e9;
    for (int N : {4, 8, 16}) {
        const AngularSumError e = angular_sum_error(angular_sum(N, 1, l, 1), l, 1);
        EXPECT_LT(e.total, prev);
        EXPECT_LE(e.orthogonal, 10 * e.parallel + 1e-15);
        prev = e.total;
    }
    EXPECT_LT(prev, 0.01);
}

TEST(AngularSum, HeuristicValue)
{
    EXPECT_NEAR(heuristic_ratio(theta_shell(32, 1), 1.0, {1, 0, 0}) / (-16.0 / 5.0), 1.0, 0.05);
    EXPECT_NEAR(heuristic_ratio(theta_shell(16, 0), 4.0, {1, 1, 1}) / (-16.0 / 5.0), 1.0, 0.05);
}

TEST(AngularSum, ContinuumIntegrals)
{
    EXPECT_NEAR(sine5_integral(), 16.0 / 15.0, 1e-14);
    EXPECT_NEAR(sphere_mean_sine4(), 8.0 / 15.0, 1e-14);
    EXPECT_NEAR(angular_sum_continuum(), angular_sum_limit, 1e-14);
}

TEST(Advection, DoubleLieIsScaledLaplacian)
{
    Rng rng(113);
    const auto xi = random_real_field(3, rng);
    for (const auto& th : {theta_shell(1, 1), theta_shell(2, 0)}) {
        const auto dl = advection_double_lie(th, xi);
        EXPECT_LE(rel(dl, (2.0 / 3.0 * theta_norms(th).l2_sq) * laplacian(xi)), 1e-12);
    }
}

TEST(Advection, StretchingEnergyClosedForm)
{
    Rng rng(127);
    const auto xi = random_real_field(4, rng);
    for (const auto& th : {theta_shell(1, 1), theta_shell(2, 1), theta_shell(3, 0)}) {
        const EnergyJ j = advection_energy_J(th, 0.6, xi);
        EXPECT_NEAR(j.lhs, j.rhs, 1e-10 * j.rhs);
    }
    // unit shell: h1/l2 = 1
    const EnergyJ j = advection_energy_J(unit_shell(), 0.6, xi);
    EXPECT_NEAR(j.rhs, 2 * 0.6 * enstrophy(xi) + 8 * 0.6 * pi * pi * l2_norm_sq(xi), 1e-12 * j.rhs);
    EXPECT_THROW(advection_energy_J(theta_shell(2, 1), 1, xi, 5), std::domain_error);
}
