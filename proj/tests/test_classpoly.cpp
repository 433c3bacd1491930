#include "doctest.h"
#include "oracles.hpp"

#include "twistlocal/classpoly.hpp"
#include "twistlocal/errors.hpp"

#include <filesystem>
#include <fstream>

using namespace twistlocal;
using namespace twistlocal::classpoly;

namespace {

std::string poly(std::int64_t D) { return compute_hilbert_class_poly(D).to_string(); }

bool root_by_evaluation(const HilbertClassPoly& H, std::uint64_t p) {
    std::vector<mpz_class> c;
    for (const auto& a : H.coeffs) {
        mpz_class r = a % static_cast<unsigned long>(p);
        if (r < 0) r += static_cast<unsigned long>(p);
        c.push_back(r);
    }
    for (std::uint64_t x = 0; x < p; ++x) {
        mpz_class v = 0;
        for (const auto& a : c) v = (v * static_cast<unsigned long>(x) + a) % static_cast<unsigned long>(p);
        if (v == 0) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("class number one polynomials") {
    CHECK(poly(-3) == "X");
    CHECK(poly(-4) == "X - 1728");
    CHECK(poly(-7) == "X + 3375");
    CHECK(poly(-8) == "X - 8000");
    CHECK(poly(-11) == "X + 32768");
    CHECK(poly(-12) == "X - 54000");
    CHECK(poly(-16) == "X - 287496");
    CHECK(poly(-19) == "X + 884736");
    CHECK(poly(-27) == "X + 12288000");
    CHECK(poly(-28) == "X - 16581375");
    CHECK(poly(-43) == "X + 884736000");
    CHECK(poly(-67) == "X + 147197952000");
    CHECK(poly(-163) == "X + 262537412640768000");
}

TEST_CASE("higher class number polynomials") {
    CHECK(poly(-15) == "X^2 + 191025*X - 121287375");
    CHECK(poly(-20) == "X^2 - 1264000*X - 681472000");
    CHECK(poly(-23) == "X^3 + 3491750*X^2 - 5151296875*X + 12771880859375");
    CHECK(poly(-52) == "X^2 - 6896880000*X - 567663552000000");
    const auto H = compute_hilbert_class_poly(-104);
    CHECK(H.degree == 6);
    CHECK(H.coeffs.front() == 1);
}

TEST_CASE("reduced forms agree with direct search") {
    for (std::int64_t D = -3; D >= -3000; --D) {
        const std::int64_t r = ((D % 4) + 4) % 4;
        if (r == 2 || r == 3) {
            CHECK_THROWS_AS(check_discriminant(D), DomainError);
            continue;
        }
        const auto forms = reduced_forms(D);
        const auto want = oracle::reduced_forms(D);
        REQUIRE(forms.size() == want.size());
        for (const auto& f : forms) CHECK(want.count({f.a, f.b, f.c}) == 1);
        CHECK(class_number(D) == static_cast<int>(want.size()));
    }
    CHECK(class_number(-104) == 6);
    CHECK(class_number(-23) == 3);
    CHECK(class_number(-52) == 2);
}

TEST_CASE("discriminant validation") {
    CHECK_THROWS_AS(check_discriminant(0), DomainError);
    CHECK_THROWS_AS(check_discriminant(5), DomainError);
    CHECK_THROWS_AS(check_discriminant(-1), DomainError);
    CHECK_THROWS_AS(check_discriminant(-2), DomainError);
    EvalOptions small;
    small.disc_bound = 100;
    CHECK_THROWS_AS(compute_hilbert_class_poly(-104, small), BoundError);
}

TEST_CASE("degree equals class number and doubling the precision changes nothing") {
    EvalOptions doubled;
    doubled.precision_scale = 2.0;
    for (std::int64_t D = -3; D >= -1500; --D) {
        const std::int64_t r = ((D % 4) + 4) % 4;
        if (r == 2 || r == 3) continue;
        const auto H = compute_hilbert_class_poly(D);
        REQUIRE(H.degree == class_number(D));
        REQUIRE(H.coeffs.size() == static_cast<std::size_t>(H.degree + 1));
        const auto H2 = compute_hilbert_class_poly(D, doubled);
        CHECK_MESSAGE(H.coeffs == H2.coeffs, "D = " << D);
    }
}

TEST_CASE("root detection: gcd path agrees with evaluation") {
    for (std::int64_t D : {-20, -23, -52, -56, -104, -164, -231}) {
        const auto H = compute_hilbert_class_poly(D);
        int checked = 0;
        for (std::uint64_t p = 10007; checked < 25; p += 2) {
            if (!oracle::is_prime(p)) continue;
            ++checked;
            CHECK_MESSAGE(has_root_mod_p(H, p) == root_by_evaluation(H, p), "D = " << D << " p = " << p);
        }
        for (std::uint64_t p = 2; p < 400; ++p) {
            if (!oracle::is_prime(p)) continue;
            CHECK(has_root_mod_p(H, p) == root_by_evaluation(H, p));
        }
    }
}

TEST_CASE("known roots of H(-104)") {
    const auto H = compute_hilbert_class_poly(-104);
    CHECK(has_root_mod_p(H, 23));
    CHECK(has_root_mod_p(H, 29));
    CHECK(has_root_mod_p(H, 79));
    CHECK_THROWS_AS(has_root_mod_p(H, 15), DomainError);
}

TEST_CASE("cache records round trip") {
    const auto H = compute_hilbert_class_poly(-23);
    const auto line = format_cache_record(H);
    CHECK(line == "-23 3 3491750 -5151296875 12771880859375");
    const auto back = parse_cache_record(line);
    REQUIRE(back);
    CHECK(back->coeffs == H.coeffs);
    CHECK(back->degree == 3);
    CHECK_FALSE(parse_cache_record("-23 2 1 2"));
    CHECK_FALSE(parse_cache_record("-23 3 1 2"));
    CHECK_FALSE(parse_cache_record("garbage"));
    CHECK_FALSE(parse_cache_record("-5 1 0"));
}

TEST_CASE("store loads good records and skips malformed ones") {
    const auto dir = std::filesystem::temp_directory_path() / "twistlocal_store_test";
    std::filesystem::remove_all(dir);
    const auto file = dir / "nested" / "cache.txt";
    {
        ClassPolyStore store(file);
        CHECK(store.size() == 0);
        CHECK(store.get(-20)->to_string() == "X^2 - 1264000*X - 681472000");
        store.get(-4);
    }
    {
        std::ofstream out(file, std::ios::app);
        out << "not a record\n-23 2 1 2\n";
    }
    ClassPolyStore again(file);
    CHECK(again.size() == 2);
    CHECK(again.contains(-20));
    CHECK(again.contains(-4));
    CHECK(again.skipped_lines() == 2);
    CHECK(again.get(-4)->to_string() == "X - 1728");
    std::filesystem::remove_all(dir);
}
