#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace twistlocal::classpoly {

// Primitive positive definite form a x^2 + b x y + c y^2, reduced.
struct ReducedForm {
    std::int64_t a;
    std::int64_t b;
    std::int64_t c;

    auto operator<=>(const ReducedForm&) const = default;
};

struct HilbertClassPoly {
    std::int64_t disc = 0;
    int degree = 0;
    // Descending order, coeffs.front() == 1, coeffs.size() == degree + 1.
    std::vector<mpz_class> coeffs;
    std::vector<ReducedForm> forms;
    // Working precision (bits) of the evaluation that certified the coefficients.
    long precision_bits = 0;

    std::string to_string() const;
};

struct EvalOptions {
    // Multiplier on the estimated working precision.
    double precision_scale = 1.0;
    int max_doublings = 4;
    std::int64_t disc_bound = 1'000'000;
};

// Throws DomainError unless D < 0 and D = 0, 1 mod 4.
void check_discriminant(std::int64_t D);

std::vector<ReducedForm> reduced_forms(std::int64_t D);
int class_number(std::int64_t D);

// Estimated bit size of the largest coefficient of H_D, plus guard bits.
long precision_estimate(std::int64_t D, const std::vector<ReducedForm>& forms);

// Evaluates j at every reduced form and rounds the expanded product; never caches.
HilbertClassPoly compute_hilbert_class_poly(std::int64_t D, const EvalOptions& options = {});

// Coefficients reduced into [0, p), descending.
std::vector<std::uint64_t> reduce_mod(const HilbertClassPoly& H, std::uint64_t p);

bool has_root_mod_p(const HilbertClassPoly& H, std::uint64_t p);
// H mod p has no repeated factor, i.e. p does not divide disc(H).
bool is_separable_mod_p(const HilbertClassPoly& H, std::uint64_t p);

// Thread-safe memo of class polynomials, optionally backed by an append-only file
// with one record per line: "D degree c_{h-1} ... c_0".
class ClassPolyStore {
public:
    ClassPolyStore() = default;
    explicit ClassPolyStore(std::filesystem::path cache_file);

    ClassPolyStore(const ClassPolyStore&) = delete;
    ClassPolyStore& operator=(const ClassPolyStore&) = delete;

    std::shared_ptr<const HilbertClassPoly> get(std::int64_t D);
    bool contains(std::int64_t D) const;
    std::size_t size() const;

    // Reads every record of the file and appends future computations to it.
    void attach(std::filesystem::path cache_file);
    const std::optional<std::filesystem::path>& cache_file() const { return cache_file_; }
    std::size_t skipped_lines() const { return skipped_lines_; }

    void set_options(const EvalOptions& options);

private:
    void load_locked();
    void append_locked(const HilbertClassPoly& H);

    mutable std::shared_mutex mutex_;
    std::mutex write_mutex_;
    std::map<std::int64_t, std::shared_ptr<const HilbertClassPoly>> polys_;
    std::optional<std::filesystem::path> cache_file_;
    std::size_t skipped_lines_ = 0;
    EvalOptions options_;
};

// Process-wide store used by the convenience overloads below.
ClassPolyStore& default_store();

std::shared_ptr<const HilbertClassPoly> hilbert_class_poly(std::int64_t D);
bool has_root_mod_p(std::int64_t D, std::uint64_t p);

// Parses a cache record. Returns nullopt for malformed lines.
std::optional<HilbertClassPoly> parse_cache_record(const std::string& line);
std::string format_cache_record(const HilbertClassPoly& H);

}  // namespace twistlocal::classpoly
