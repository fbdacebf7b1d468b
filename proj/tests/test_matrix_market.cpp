#include <catch_amalgamated.hpp>

#include <sstream>

#include "amgr_sa/matrix_market.hpp"
#include "helpers.hpp"

using namespace amgr_sa;

TEST_CASE("round trip is exact") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto A = testing::random_sparse(13, 9, 0.3, seed);
        std::stringstream ss;
        write_matrix_market(A, ss);
        CHECK(read_matrix_market(ss) == A);
    }
}

TEST_CASE("1x1 matrix layout") {
    auto A = CsrMatrix::from_triplets(1, 1, {{0, 0, 4.0}});
    std::stringstream ss;
    write_matrix_market(A, ss);
    std::string header, size, entry;
    std::getline(ss, header);
    std::getline(ss, size);
    std::getline(ss, entry);
    CHECK(header.starts_with("%%MatrixMarket matrix coordinate real"));
    CHECK(size == "1 1 1");
    CHECK(entry == "1 1 4");
}

TEST_CASE("duplicates are summed") {
    std::stringstream ss("%%MatrixMarket matrix coordinate real general\n% comment\n2 2 3\n1 1 1.5\n1 1 2.5\n2 1 -1\n");
    auto A = read_matrix_market(ss);
    CHECK(A.at(0, 0) == 4.0);
    CHECK(A.at(1, 0) == -1.0);
    CHECK(A.nnz() == 2);
}

TEST_CASE("symmetric storage is expanded") {
    std::stringstream ss("%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2\n2 1 -1\n3 3 5\n");
    auto A = read_matrix_market(ss);
    CHECK(A.at(0, 1) == -1.0);
    CHECK(A.at(1, 0) == -1.0);
    CHECK(A.nnz() == 4);
}

TEST_CASE("malformed input reports the line") {
    SECTION("bad header") {
        std::stringstream ss("%%MatrixMarket matrix array real general\n1 1\n1\n");
        CHECK_THROWS_AS(read_matrix_market(ss), ParseError);
    }
    SECTION("index out of range") {
        std::stringstream ss("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
        try {
            read_matrix_market(ss);
            FAIL("expected a ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SECTION("too few entries") {
        std::stringstream ss("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n");
        CHECK_THROWS_AS(read_matrix_market(ss), ParseError);
    }
}
