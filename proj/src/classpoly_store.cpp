#include "twistlocal/classpoly.hpp"

#include "twistlocal/errors.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace twistlocal::classpoly {

std::string format_cache_record(const HilbertClassPoly& H) {
    std::ostringstream out;
    out << H.disc << ' ' << H.degree;
    for (std::size_t i = 1; i < H.coeffs.size(); ++i) out << ' ' << H.coeffs[i].get_str();
    return out.str();
}

std::optional<HilbertClassPoly> parse_cache_record(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> fields;
    for (std::string tok; in >> tok;) fields.push_back(tok);
    if (fields.size() < 3) return std::nullopt;
    HilbertClassPoly H;
    try {
        std::size_t used = 0;
        H.disc = std::stoll(fields[0], &used);
        if (used != fields[0].size()) return std::nullopt;
        H.degree = std::stoi(fields[1], &used);
        if (used != fields[1].size()) return std::nullopt;
        check_discriminant(H.disc);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (H.degree < 1 || fields.size() != static_cast<std::size_t>(H.degree) + 2) return std::nullopt;
    H.coeffs.reserve(H.degree + 1);
    H.coeffs.emplace_back(1);
    for (std::size_t i = 2; i < fields.size(); ++i) {
        mpz_class c;
        if (c.set_str(fields[i], 10) != 0) return std::nullopt;
        H.coeffs.push_back(std::move(c));
    }
    H.forms = reduced_forms(H.disc);
    if (static_cast<int>(H.forms.size()) != H.degree) return std::nullopt;
    return H;
}

ClassPolyStore::ClassPolyStore(std::filesystem::path cache_file) {
    attach(std::move(cache_file));
}

void ClassPolyStore::attach(std::filesystem::path cache_file) {
    std::unique_lock lock(mutex_);
    cache_file_ = std::move(cache_file);
    load_locked();
}

void ClassPolyStore::set_options(const EvalOptions& options) {
    std::unique_lock lock(mutex_);
    options_ = options;
}

void ClassPolyStore::load_locked() {
    std::ifstream in(*cache_file_);
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto H = parse_cache_record(line);
        if (!H) {
            ++skipped_lines_;
            std::cerr << "warning: " << cache_file_->string() << ":" << lineno << ": skipping malformed class polynomial record\n";
            continue;
        }
        const std::int64_t D = H->disc;
        polys_.try_emplace(D, std::make_shared<const HilbertClassPoly>(std::move(*H)));
    }
}

void ClassPolyStore::append_locked(const HilbertClassPoly& H) {
    if (!cache_file_) return;
    std::lock_guard guard(write_mutex_);
    if (cache_file_->has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(cache_file_->parent_path(), ec);
    }
    std::ofstream out(*cache_file_, std::ios::app);
    if (!out) {
        std::cerr << "warning: cannot append to class polynomial cache " << cache_file_->string() << "\n";
        return;
    }
    out << format_cache_record(H) << '\n';
}

std::shared_ptr<const HilbertClassPoly> ClassPolyStore::get(std::int64_t D) {
    {
        std::shared_lock lock(mutex_);
        if (auto it = polys_.find(D); it != polys_.end()) return it->second;
    }
    EvalOptions options;
    {
        std::shared_lock lock(mutex_);
        options = options_;
    }
    auto H = std::make_shared<const HilbertClassPoly>(compute_hilbert_class_poly(D, options));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = polys_.try_emplace(D, H);
    if (inserted) append_locked(*H);
    return it->second;
}

bool ClassPolyStore::contains(std::int64_t D) const {
    std::shared_lock lock(mutex_);
    return polys_.count(D) != 0;
}

std::size_t ClassPolyStore::size() const {
    std::shared_lock lock(mutex_);
    return polys_.size();
}

ClassPolyStore& default_store() {
    static ClassPolyStore store;
    return store;
}

std::shared_ptr<const HilbertClassPoly> hilbert_class_poly(std::int64_t D) {
    return default_store().get(D);
}

bool has_root_mod_p(std::int64_t D, std::uint64_t p) {
    return has_root_mod_p(*hilbert_class_poly(D), p);
}

}  // namespace twistlocal::classpoly
