#include <catch2/catch_amalgamated.hpp>

#include "lmqn/compact.hpp"
#include "lmqn/qr_engine.hpp"
#include "test_support.hpp"

using namespace lmqn;

namespace {

Matrix take_cols(const Matrix& a, std::size_t first, std::size_t count) {
    Matrix out(a.rows(), count);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = a(i, first + j);
    return out;
}

void append_from(ThinQR& qr, const Matrix& full, std::size_t col) {
    qr.append_column(take_cols(full, 0, col), full.col(col));
}

} // namespace

TEST_CASE("scratch factorization on hand matrices", "[qr]") {
    SECTION("single 3-4 column gives R = [5]") {
        Matrix a(2, 1);
        a(0, 0) = 3.0;
        a(1, 0) = 4.0;
        const ThinQR qr = qr_from_scratch(a);
        REQUIRE(qr.l() == 1);
        REQUIRE(qr.r1()(0, 0) == Catch::Approx(5.0));
    }
    SECTION("already triangular input is reproduced") {
        Matrix a(3, 2);
        a(0, 0) = 1.0; a(0, 1) = 2.0;
        a(1, 1) = 3.0;
        const ThinQR qr = qr_from_scratch(a);
        REQUIRE(qr.r1()(0, 0) == Catch::Approx(1.0));
        REQUIRE(qr.r1()(0, 1) == Catch::Approx(2.0));
        REQUIRE(qr.r1()(1, 1) == Catch::Approx(3.0));
        REQUIRE(qr.r1()(1, 0) == 0.0);
    }
    SECTION("column permutation of the identity gives R = I") {
        Matrix a(2, 2);
        a(0, 1) = 1.0;
        a(1, 0) = 1.0;
        const ThinQR qr = qr_from_scratch(a);
        REQUIRE(qr.r1()(0, 0) == Catch::Approx(1.0));
        REQUIRE(qr.r1()(1, 1) == Catch::Approx(1.0));
        REQUIRE(qr.r1()(0, 1) == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("more columns than rows is rejected") {
        REQUIRE_THROWS_AS(qr_from_scratch(Matrix(2, 3)), DimensionError);
    }
}

TEST_CASE("scratch factor satisfies R'R = A'A with nonnegative diagonal", "[qr]") {
    PairGenerator gen(121);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t l = 1 + static_cast<std::size_t>((gen.entry() + 1.0) * 3.5);
        const std::size_t n = l + 5 + static_cast<std::size_t>((gen.entry() + 1.0) * 10);
        const Matrix a = testsup::random_matrix(gen, n, l);
        const ThinQR qr = qr_from_scratch(a);
        const Matrix& r = qr.r1();

        const Matrix gram = multiply(transpose(a), a);
        const Matrix rtr = multiply(transpose(r), r);
        REQUIRE(testsup::rel_diff(rtr, gram) < 1e-13);
        for (std::size_t i = 0; i < l; ++i) {
            REQUIRE(r(i, i) >= 0.0);
            for (std::size_t j = 0; j < i; ++j) REQUIRE(r(i, j) == 0.0);
        }
        REQUIRE(qr.status());
    }
}

TEST_CASE("append grows the factor to match scratch", "[qr]") {
    PairGenerator gen(122);
    for (int rep = 0; rep < 15; ++rep) {
        const std::size_t l = 2 + static_cast<std::size_t>((gen.entry() + 1.0) * 3);
        const std::size_t n = l + 12;
        const Matrix full = testsup::random_matrix(gen, n, l);

        ThinQR qr = qr_from_scratch(take_cols(full, 0, l - 1));
        append_from(qr, full, l - 1);
        const ThinQR scratch = qr_from_scratch(full);
        REQUIRE(testsup::rel_diff(qr.r1(), scratch.r1()) < 1e-12);
    }
}

TEST_CASE("append starting from an empty factor", "[qr]") {
    ThinQR qr;
    REQUIRE(qr.l() == 0);
    Matrix none(4, 0);
    qr.append_column(none, Vector{3.0, 0.0, 4.0, 0.0});
    REQUIRE(qr.l() == 1);
    REQUIRE(qr.r1()(0, 0) == Catch::Approx(5.0));
}

TEST_CASE("delete_leading_columns matches scratch of the suffix", "[qr]") {
    PairGenerator gen(123);
    for (const std::size_t count : {std::size_t{1}, std::size_t{2}}) {
        for (int rep = 0; rep < 15; ++rep) {
            const std::size_t l =
                count + 1 + static_cast<std::size_t>((gen.entry() + 1.0) * 3);
            const std::size_t n = l + 10;
            const Matrix full = testsup::random_matrix(gen, n, l);

            ThinQR qr = qr_from_scratch(full);
            qr.delete_leading_columns(count);
            const ThinQR suffix = qr_from_scratch(take_cols(full, count, l - count));
            REQUIRE(qr.l() == l - count);
            REQUIRE(testsup::rel_diff(qr.r1(), suffix.r1()) < 1e-12);
        }
    }
}

TEST_CASE("givens downdate on a hand factor", "[qr]") {
    // R = [[1,3],[0,4]]: dropping the first column rotates (3,4) into 5
    Matrix r(2, 2);
    r(0, 0) = 1.0; r(0, 1) = 3.0; r(1, 1) = 4.0;
    ThinQR qr{Matrix(r)};
    qr.delete_leading_columns(1);
    REQUIRE(qr.l() == 1);
    REQUIRE(qr.r1()(0, 0) == Catch::Approx(5.0));
}

TEST_CASE("churn: interleaved appends and deletes track scratch", "[qr]") {
    PairGenerator gen(124);
    const std::size_t n = 40;
    std::vector<Vector> cols;
    auto current = [&]() {
        Matrix a(n, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) a.set_col(j, cols[j]);
        return a;
    };

    for (std::size_t j = 0; j < 6; ++j) cols.push_back(gen.draw(n));
    ThinQR qr = qr_from_scratch(current());

    for (int op = 0; op < 20; ++op) {
        if (op % 3 == 2) {
            qr.delete_leading_columns(2);
            cols.erase(cols.begin(), cols.begin() + 2);
        } else {
            const Matrix before = current();
            cols.push_back(gen.draw(n));
            qr.append_column(before, cols.back());
        }
        const ThinQR scratch = qr_from_scratch(current());
        REQUIRE(testsup::rel_diff(qr.r1(), scratch.r1()) < 1e-12);
    }
}

TEST_CASE("append rejects rank-deficient growth", "[qr]") {
    PairGenerator gen(125);
    const Matrix a = testsup::random_matrix(gen, 10, 3);
    ThinQR qr = qr_from_scratch(a);
    const std::size_t before = qr.l();
    // the zero column has no component orthogonal to the span
    REQUIRE_THROWS_AS(qr.append_column(a, Vector(10, 0.0)), RankError);
    REQUIRE(qr.l() == before); // factor unchanged after the failed append
}

TEST_CASE("append detects impossible norms", "[qr]") {
    ThinQR qr{Matrix::identity(1)};
    // claimed product exceeds the column norm: cancellation beyond tolerance
    REQUIRE_THROWS_AS(qr.append_column_precomputed(Vector{2.0}, 1.0), NumericalError);
}

TEST_CASE("rank_status classification", "[qr]") {
    SECTION("full rank") {
        const RankStatus st = rank_status(Matrix::identity(3));
        REQUIRE(st);
        REQUIRE(st.kind == RankKind::FullRank);
        REQUIRE(st.ratio == 1.0);
    }
    SECTION("ill conditioned below the 1e-8 ratio") {
        Matrix r = Matrix::identity(2);
        r(1, 1) = 1e-9;
        const RankStatus st = rank_status(r);
        REQUIRE_FALSE(st);
        REQUIRE(st.kind == RankKind::IllConditioned);
        REQUIRE(st.ratio == Catch::Approx(1e-9));
    }
    SECTION("deficient on a vanished diagonal") {
        Matrix r = Matrix::identity(3);
        r(1, 1) = 0.0;
        const RankStatus st = rank_status(r);
        REQUIRE(st.kind == RankKind::Deficient);
        REQUIRE(st.index == 1);
    }
    SECTION("zero factor is deficient, empty factor is full rank") {
        REQUIRE(rank_status(Matrix(2, 2)).kind == RankKind::Deficient);
        REQUIRE(rank_status(Matrix(0, 0)));
    }
}

TEST_CASE("delete_leading_columns argument checks", "[qr]") {
    ThinQR qr = qr_from_scratch(Matrix::identity(3));
    REQUIRE_THROWS_AS(qr.delete_leading_columns(0), Error);
    REQUIRE_THROWS_AS(qr.delete_leading_columns(3), Error);
    ThinQR small{Matrix::identity(1)};
    REQUIRE_THROWS_AS(small.delete_leading_columns(2), DimensionError);
}
