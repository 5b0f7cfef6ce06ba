#include <catch2/catch_amalgamated.hpp>

#include "lmqn/compact.hpp"
#include "lmqn/oracle.hpp"
#include "test_support.hpp"

using namespace lmqn;

namespace {

PairBuffer single_pair_buffer() {
    PairBuffer buf(2, 4);
    buf.push(Pair{{1.0, 0.0}, {2.0, 0.0}});
    return buf;
}

} // namespace

TEST_CASE("compact forms on the single-pair hand example", "[compact]") {
    const PairBuffer buf = single_pair_buffer();

    SECTION("bfgs: M = diag(-1, 1/2), B = diag(2, 1)") {
        const CompactForm f = build_bfgs(buf, 1.0);
        REQUIRE(f.l() == 2);
        REQUIRE(f.m(0, 0) == Catch::Approx(-1.0));
        REQUIRE(f.m(1, 1) == Catch::Approx(0.5));
        REQUIRE(f.m(0, 1) == Catch::Approx(0.0).margin(1e-15));

        const Matrix b = reconstruct_dense(f, assemble_psi(f.family, buf, 1.0));
        REQUIRE(b(0, 0) == Catch::Approx(2.0));
        REQUIRE(b(1, 1) == Catch::Approx(1.0));
    }
    SECTION("dfp: M = [[0,-1/2],[-1/2,3/4]]") {
        const CompactForm f = build_dfp(buf, 1.0);
        REQUIRE(f.m(0, 0) == Catch::Approx(0.0).margin(1e-15));
        REQUIRE(f.m(0, 1) == Catch::Approx(-0.5));
        REQUIRE(f.m(1, 0) == Catch::Approx(-0.5));
        REQUIRE(f.m(1, 1) == Catch::Approx(0.75));
    }
    SECTION("sr1 with y = 3 e1: M = [[1/2]], B = diag(3, 1)") {
        PairBuffer sbuf(2, 4);
        sbuf.push(Pair{{1.0, 0.0}, {3.0, 0.0}});
        const CompactForm f = build_sr1(sbuf, 1.0);
        REQUIRE(f.l() == 1);
        REQUIRE(f.m(0, 0) == Catch::Approx(0.5));
        const Matrix b = reconstruct_dense(f, assemble_psi(f.family, sbuf, 1.0));
        REQUIRE(b(0, 0) == Catch::Approx(3.0));
        REQUIRE(b(1, 1) == Catch::Approx(1.0));
    }
    SECTION("broyden phi = 1/2: M = [[-1/2,-1/4],[-1/4,5/8]], lambda0 = -4/3") {
        BroydenDetail det;
        const CompactForm f = build_broyden(buf, 1.0, 0.5, &det);
        REQUIRE(f.m(0, 0) == Catch::Approx(-0.5));
        REQUIRE(f.m(0, 1) == Catch::Approx(-0.25));
        REQUIRE(f.m(1, 1) == Catch::Approx(0.625));
        REQUIRE(det.lambda[0] == Catch::Approx(-4.0 / 3.0));
        REQUIRE(det.sbs[0] == Catch::Approx(1.0));
    }
    SECTION("broyden inverse identity on the hand example") {
        const Matrix minv = broyden_m_inverse(buf, 1.0, 0.5);
        REQUIRE(minv(0, 0) == Catch::Approx(-5.0 / 3.0));
        REQUIRE(minv(0, 1) == Catch::Approx(-2.0 / 3.0));
        REQUIRE(minv(1, 1) == Catch::Approx(4.0 / 3.0));
    }
}

TEST_CASE("compact form equals the dense recursion for every family",
          "[compact]") {
    // the central correctness property: gamma I + Psi M Psi' must reproduce
    // the recursively updated dense matrix
    std::uint64_t seed = 60;
    for (int fam = 0; fam < 5; ++fam) {
        const UpdateFamily family = fam == 0   ? UpdateFamily::bfgs()
                                    : fam == 1 ? UpdateFamily::dfp()
                                    : fam == 2 ? UpdateFamily::sr1()
                                    : fam == 3 ? UpdateFamily::broyden(0.5)
                                               : UpdateFamily::broyden(0.9);
        for (const double gamma : {0.7, 3.0}) {
            for (const std::size_t m : {std::size_t{1}, std::size_t{3}, std::size_t{5}}) {
                const std::size_t n = 2 * m + 7;
                const PairBuffer buf = testsup::filled_buffer(n, m, ++seed, family, gamma);
                const CompactForm form = build_compact(family, buf, gamma);
                const Matrix bc =
                    reconstruct_dense(form, assemble_psi(family, buf, gamma));
                const DenseBuild ref = dense_build(family, buf, gamma);
                REQUIRE(ref.skipped.empty());
                REQUIRE(testsup::rel_diff(bc, ref.b) < 1e-12);
            }
        }
    }
}

TEST_CASE("broyden endpoints reproduce bfgs and dfp", "[compact]") {
    for (std::uint64_t seed : {70, 71, 72}) {
        const PairBuffer buf =
            testsup::filled_buffer(20, 4, seed, UpdateFamily::bfgs(), 3.0);
        const Matrix m0 = build_broyden(buf, 3.0, 0.0).m;
        const Matrix m1 = build_broyden(buf, 3.0, 1.0).m;
        REQUIRE(testsup::rel_diff(m0, build_bfgs(buf, 3.0).m) < 1e-12);
        REQUIRE(testsup::rel_diff(m1, build_dfp(buf, 3.0).m) < 1e-12);
    }
}

TEST_CASE("broyden closed-form inverse property", "[compact]") {
    // The identity residual scales with cond(M) * eps, so draws are screened
    // by ||M||*||Minv|| <= 3e4, computed from the two independently assembled
    // matrices; a wrong formula still fails the residual check below.
    std::uint64_t seed = 80;
    for (const double phi : {0.1, 0.5, 0.9}) {
        for (const std::size_t m : {std::size_t{2}, std::size_t{5}}) {
            int checked = 0;
            for (int draw = 0; draw < 12 && checked < 2; ++draw) {
                const PairBuffer buf = testsup::filled_buffer(
                    2 * m + 5, m, ++seed, UpdateFamily::broyden(phi), 3.0);
                const Matrix mm = build_broyden(buf, 3.0, phi).m;
                const Matrix mi = broyden_m_inverse(buf, 3.0, phi);
                if (norm_inf(mm) * norm_inf(mi) > 3e4) continue;
                ++checked;
                Matrix prod = multiply(mm, mi);
                for (std::size_t i = 0; i < prod.rows(); ++i) prod(i, i) -= 1.0;
                REQUIRE(norm_inf(prod) < 1e-10);
            }
            REQUIRE(checked == 2);
        }
    }
}

TEST_CASE("compact form satisfies the latest secant equation", "[compact]") {
    std::uint64_t seed = 90;
    for (int fam = 0; fam < 4; ++fam) {
        const UpdateFamily family = fam == 0   ? UpdateFamily::bfgs()
                                    : fam == 1 ? UpdateFamily::dfp()
                                    : fam == 2 ? UpdateFamily::sr1()
                                               : UpdateFamily::broyden(0.3);
        const std::size_t m = 4;
        const PairBuffer buf = testsup::filled_buffer(25, m, ++seed, family, 3.0);
        const CompactForm form = build_compact(family, buf, 3.0);
        const Matrix psi = assemble_psi(family, buf, 3.0);

        const Pair& last = buf.pair(m - 1);
        Vector bs = apply_b(form, psi, last.s);
        for (std::size_t i = 0; i < bs.size(); ++i) bs[i] -= last.y[i];
        REQUIRE(norm2(bs) < 1e-10 * norm2(last.y));
    }
}

TEST_CASE("compact builder validation", "[compact]") {
    const PairBuffer buf = single_pair_buffer();
    PairBuffer empty(2, 2);
    REQUIRE_THROWS_AS(build_bfgs(empty, 1.0), EmptyHistoryError);
    REQUIRE_THROWS_AS(build_bfgs(buf, 0.0), PositivityError);
    REQUIRE_THROWS_AS(build_broyden(buf, 1.0, 2.0), Error);

    // curvature violation carries the offending index
    PairBuffer bad(2, 3);
    bad.push(Pair{{1.0, 0.0}, {2.0, 0.0}});
    bad.push(Pair{{0.0, 1.0}, {0.0, -1.0}});
    try {
        (void)build_dfp(bad, 1.0);
        FAIL("expected CurvatureError");
    } catch (const CurvatureError& err) {
        REQUIRE(err.index() == 1);
    }

    // sr1 inner matrix singular when y = gamma s
    PairBuffer sing(2, 2);
    sing.push(Pair{{1.0, 0.0}, {3.0, 0.0}});
    REQUIRE_THROWS_AS(build_sr1(sing, 3.0), SingularMError);
}

TEST_CASE("perfect shuffle permutation", "[compact]") {
    REQUIRE(shuffle_permutation(1) == std::vector<std::size_t>{0, 1});
    REQUIRE(shuffle_permutation(2) == std::vector<std::size_t>{0, 2, 1, 3});
    REQUIRE(shuffle_permutation(3) == std::vector<std::size_t>{0, 3, 1, 4, 2, 5});
}

TEST_CASE("shuffled pieces reproduce the blocked product", "[compact]") {
    std::uint64_t seed = 100;
    for (int fam = 0; fam < 3; ++fam) {
        const UpdateFamily family = fam == 0   ? UpdateFamily::bfgs()
                                    : fam == 1 ? UpdateFamily::sr1()
                                               : UpdateFamily::broyden(0.5);
        const PairBuffer buf = testsup::filled_buffer(15, 3, ++seed, family, 3.0);
        const CompactForm form = build_compact(family, buf, 3.0);

        const Matrix blocked = reconstruct_dense(form, assemble_psi(family, buf, 3.0));
        CompactForm shuffled = form;
        shuffled.m = shuffled_m(form);
        const Matrix inter =
            reconstruct_dense(shuffled, assemble_psi_shuffled(family, buf, 3.0));
        REQUIRE(testsup::rel_diff(inter, blocked) < 1e-13);
    }
}

TEST_CASE("apply_b agrees with the reconstructed matrix", "[compact]") {
    PairGenerator gen(110);
    const PairBuffer buf = testsup::filled_buffer(12, 3, 111, UpdateFamily::dfp(), 2.0);
    const CompactForm form = build_dfp(buf, 2.0);
    const Matrix psi = assemble_psi(form.family, buf, 2.0);
    const Matrix b = reconstruct_dense(form, psi);
    const Vector v = gen.draw(12);
    const Vector direct = apply_b(form, psi, v);
    const Vector dense = multiply(b, v);
    for (std::size_t i = 0; i < 12; ++i)
        REQUIRE(direct[i] == Catch::Approx(dense[i]).margin(1e-12));
}
