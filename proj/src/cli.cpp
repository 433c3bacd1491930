#include "twistlocal/cli.hpp"

#include "twistlocal/classpoly.hpp"
#include "twistlocal/errors.hpp"
#include "twistlocal/localpoints.hpp"
#include "twistlocal/picard.hpp"
#include "twistlocal/twistsearch.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace twistlocal::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr const char* kFooter = R"(Exit status:
  0   success (verdict: Yes)
  1   verdict: No
  2   verdict: Unknown
  64  usage error or malformed input parameters
  65  domain or data error (including failed density preflight)
  66  input file missing or unreadable
  69  a computational bound was exceeded
  70  internal error (precision exhausted, dispatch failure)

Environment:
  TWISTLOCAL_CACHE  class polynomial cache file (default ./.twistlocal/classpoly.cache))";

std::filesystem::path cache_path() {
    if (const char* env = std::getenv("TWISTLOCAL_CACHE"); env && *env) return env;
    return std::filesystem::path(".twistlocal") / "classpoly.cache";
}

void attach_cache() {
    auto& store = classpoly::default_store();
    if (!store.cache_file()) store.attach(cache_path());
}

std::uint64_t parse_unsigned(const std::string& text, const char* flag) {
    const std::int64_t v = parse_int(text);
    if (v < 0) throw UsageError(std::string(flag) + " must be nonnegative");
    return static_cast<std::uint64_t>(v);
}

void strip_traces(nlohmann::json& j) {
    if (j.is_object()) {
        j.erase("trace");
        if (j.contains("verdicts")) {
            for (auto& v : j["verdicts"]) v.erase("trace");
        }
    }
}

int exit_for(localpoints::Status s) {
    switch (s) {
        case localpoints::Status::Yes: return kExitOk;
        case localpoints::Status::No: return kExitNo;
        case localpoints::Status::Unknown: return kExitUnknown;
    }
    return kExitInternal;
}

struct Options {
    std::string m, d, prime, bound, limit, X, B, disc, cusp_order, sieve_file, format;
    std::string p, qs, pic1, solve, relations, method, threads;
    bool trace = false, sorted = false, inert = false;
};

int run_verdict(const Options& o, std::ostream& out) {
    if (o.format != "" && o.format != "json") throw UsageError("verdict supports --format json only");
    if (o.m.empty() || o.d.empty()) throw UsageError("verdict needs --m and --d");
    const auto m = parse_int_list(o.m);
    const auto d = parse_int_list(o.d);
    std::optional<localpoints::TwistSpec> spec;
    try {
        spec.emplace(m, d);
    } catch (const DomainError& e) {
        throw UsageError(std::string("invalid twist: ") + e.what());
    }
    attach_cache();
    if (!o.prime.empty()) {
        const std::int64_t p = parse_int(o.prime);
        if (p < 2 || !ntkernel::is_prime(static_cast<std::uint64_t>(p))) throw UsageError("--prime must be a prime");
        const auto v = localpoints::verdict_at(*spec, p);
        auto j = localpoints::to_json(v);
        if (!o.trace) strip_traces(j);
        out << j.dump() << '\n';
        return exit_for(v.status);
    }
    const auto agg = localpoints::everywhere_local(*spec);
    auto j = localpoints::to_json(agg);
    if (!o.trace) strip_traces(j);
    out << j.dump() << '\n';
    return exit_for(agg.status);
}

int run_search(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.format != "" && o.format != "json") throw UsageError("search supports --format json only");
    if (o.m.empty()) throw UsageError("search needs --m");
    twistsearch::SearchConfig cfg;
    cfg.m = parse_int_list(o.m);
    if (!o.bound.empty()) cfg.bound = parse_int(o.bound);
    if (!o.limit.empty()) cfg.limit = parse_unsigned(o.limit, "--limit");
    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    attach_cache();
    auto line = [&](const twistsearch::SearchHit& h) {
        auto j = twistsearch::to_json(h);
        if (o.trace) j["trace"] = localpoints::to_json(h.verdict);
        return j.dump();
    };
    twistsearch::SearchDiagnostics diag;
    if (o.sorted) {
        auto hits = twistsearch::enumerate_twists(cfg, &diag);
        std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.d < b.d; });
        for (const auto& h : hits) out << line(h) << '\n';
    } else {
        diag = twistsearch::enumerate_twists(cfg, [&](const twistsearch::SearchHit& h) {
            out << line(h) << '\n' << std::flush;
            return true;
        });
    }
    err << "search: candidates=" << diag.candidates << " tuples=" << diag.tuples_examined
        << " rejected_ramification=" << diag.rejected_disjoint_ramification
        << " rejected_small_primes=" << diag.rejected_small_primes
        << " rejected_ramified_large=" << diag.rejected_ramified_large
        << " rejected_invalid=" << diag.rejected_invalid_spec << " suppressed=" << diag.suppressed
        << " emitted=" << diag.emitted << '\n';
    return kExitOk;
}

int run_density(const Options& o, std::ostream& out, std::ostream& err) {
    const std::string format = o.format.empty() ? "csv" : o.format;
    if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
    const auto m = parse_int_list(o.m);
    if (m.size() != 2) throw UsageError("density needs --m m1,m2");
    if (o.X.empty()) throw UsageError("density needs --X");
    const std::uint64_t X = parse_unsigned(o.X, "--X");
    const std::uint64_t B = o.B.empty() ? 1'000'000 : parse_unsigned(o.B, "--B");
    const unsigned threads = o.threads.empty() ? 0 : static_cast<unsigned>(parse_unsigned(o.threads, "--threads"));
    attach_cache();
    std::int64_t d1 = 0;
    if (o.d.empty()) {
        auto found = twistsearch::smallest_admissible_d1(m[0], m[1], 100'000'000'000LL);
        if (!found) throw DomainError("no admissible d1 below 1e11");
        d1 = *found;
        err << "density: using smallest admissible d1 = " << d1 << '\n';
    } else {
        const auto d = parse_int_list(o.d);
        if (d.size() != 1) throw UsageError("density needs a single --d d1");
        d1 = d[0];
    }
    const auto res = twistsearch::count_A_prime(m[0], m[1], d1, X, B, threads);
    if (!res.report) {
        err << "density: preflight failed: " << res.preflight.failures() << '\n';
        if (format == "json") {
            nlohmann::json j;
            for (const auto& c : res.preflight.checks) j["preflight"].push_back({{"check", c.name}, {"ok", c.ok}, {"detail", c.detail}});
            out << j.dump() << '\n';
        }
        return kExitData;
    }
    const auto& r = *res.report;
    err << r.header << '\n';
    if (format == "csv") {
        out << twistsearch::to_csv(r);
    } else {
        nlohmann::json j{{"m1", m[0]}, {"m2", m[1]}, {"d1", d1}, {"alpha_hat", r.alpha_hat}, {"sample_bound", r.sample_bound},
                         {"smallest", r.smallest}, {"header", r.header}};
        for (std::size_t i = 0; i < r.counts.size(); ++i) {
            j["rows"].push_back({{"X", r.counts[i].first}, {"count", r.counts[i].second}, {"c_hat", r.c_trajectory[i].second}});
        }
        out << j.dump() << '\n';
    }
    return kExitOk;
}

int run_classpoly(const Options& o, std::ostream& out) {
    if (o.disc.empty()) throw UsageError("classpoly needs --disc");
    const std::int64_t D = parse_int(o.disc);
    try {
        classpoly::check_discriminant(D);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    attach_cache();
    const auto H = classpoly::hilbert_class_poly(D);
    std::optional<bool> root;
    if (!o.prime.empty()) {
        const std::int64_t p = parse_int(o.prime);
        if (p < 2 || !ntkernel::is_prime(static_cast<std::uint64_t>(p))) throw UsageError("--prime must be a prime");
        root = classpoly::has_root_mod_p(*H, static_cast<std::uint64_t>(p));
    }
    if (o.format == "json") {
        nlohmann::json j{{"disc", D}, {"degree", H->degree}, {"poly", H->to_string()}};
        std::vector<std::string> coeffs;
        for (const auto& c : H->coeffs) coeffs.push_back(c.get_str());
        j["coeffs"] = coeffs;
        if (root) j["root_mod_p"] = *root;
        out << j.dump() << '\n';
    } else if (o.format.empty()) {
        out << H->to_string() << '\n';
        if (root) out << "root mod " << o.prime << ": " << (*root ? "yes" : "no") << '\n';
    } else {
        throw UsageError("classpoly supports --format json only");
    }
    return kExitOk;
}

std::vector<std::uint64_t> parse_primes(const std::string& text) {
    std::vector<std::uint64_t> out;
    for (auto v : parse_int_list(text)) {
        if (v < 0) throw UsageError("prime lists must be positive");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

int run_picard(const Options& o, std::ostream& out) {
    const bool json = o.format == "json";
    if (!o.format.empty() && !json) throw UsageError("picard supports --format json only");
    const int actions = !o.cusp_order.empty() + !o.pic1.empty() + !o.solve.empty() + (!o.p.empty() && o.pic1.empty());
    if (actions != 1) throw UsageError("picard needs exactly one of --cusp-order, --p with --qs, --pic1, --solve");

    if (!o.cusp_order.empty()) {
        const auto v = picard::cusp_order_prime(parse_unsigned(o.cusp_order, "--cusp-order"));
        out << (json ? nlohmann::json{{"cusp_order", v}}.dump() : std::to_string(v)) << '\n';
        return kExitOk;
    }
    if (!o.solve.empty()) {
        picard::CuspidalModel model;
        model.n = parse_unsigned(o.solve, "--solve");
        std::size_t idx = 0;
        std::string rel = o.relations;
        std::size_t start = 0;
        while (!rel.empty() && start <= rel.size()) {
            const auto end = std::min(rel.find(',', start), rel.size());
            const auto item = rel.substr(start, end - start);
            const auto colon = item.find(':');
            if (colon == std::string::npos) throw UsageError("--relations expects u:t pairs");
            model.relations.push_back({"r" + std::to_string(++idx), parse_unsigned(item.substr(0, colon), "multiplier"),
                                       parse_unsigned(item.substr(colon + 1), "target")});
            start = end + 1;
        }
        const auto sols = picard::solve_cuspidal_relations(model);
        if (json) {
            out << nlohmann::json{{"n", model.n}, {"solutions", sols}}.dump() << '\n';
        } else {
            for (std::size_t i = 0; i < sols.size(); ++i) out << (i ? " " : "") << sols[i];
            out << '\n';
        }
        return kExitOk;
    }
    if (!o.pic1.empty()) {
        const auto N = parse_unsigned(o.pic1, "--pic1");
        const auto v = o.qs.empty() ? picard::pic1_verdict_prime(N, o.inert)
                                    : picard::pic1_verdict_composite(N, parse_primes(o.qs), o.inert);
        if (json) {
            out << nlohmann::json{{"pic1", std::string(picard::to_string(v.value))}, {"reason", v.reason}}.dump() << '\n';
        } else {
            out << picard::to_string(v.value) << '\n';
        }
        return kExitOk;
    }
    if (o.qs.empty()) throw UsageError("--p needs --qs");
    const auto v = picard::cusp_order_composite(parse_unsigned(o.p, "--p"), parse_primes(o.qs));
    out << (json ? nlohmann::json{{"cusp_order", v}}.dump() : std::to_string(v)) << '\n';
    return kExitOk;
}

int run_sieve(const Options& o, std::ostream& out) {
    if (o.sieve_file.empty()) throw UsageError("sieve needs --sieve-file");
    std::ifstream in(o.sieve_file);
    if (!in) throw MissingInput("cannot read " + o.sieve_file);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("sieve file is not valid JSON: ") + e.what());
    }
    picard::SieveMethod method = picard::SieveMethod::Auto;
    if (o.method == "enumerate") method = picard::SieveMethod::Enumerate;
    else if (o.method == "prune") method = picard::SieveMethod::Prune;
    else if (!o.method.empty() && o.method != "auto") throw UsageError("--method must be auto, enumerate or prune");
    const auto data = picard::sieve_data_from_json(j);
    const auto res = picard::mw_sieve_check(data, method);
    if (o.format == "json") {
        nlohmann::json r{{"outcome", std::string(picard::to_string(res.outcome))},
                         {"method", res.method == picard::SieveMethod::Prune ? "prune" : "enumerate"}};
        if (res.method == picard::SieveMethod::Prune) r["survivors"] = res.survivors;
        else r["subgroup_size"] = res.subgroup_size;
        out << r.dump() << '\n';
    } else if (o.format.empty()) {
        out << picard::to_string(res.outcome) << '\n';
    } else {
        throw UsageError("sieve supports --format json only");
    }
    return kExitOk;
}

}  // namespace

std::int64_t parse_int(const std::string& text) {
    std::int64_t v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') throw UsageError("bad integer '" + text + "'");
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty()) throw UsageError("bad integer '" + text + "'");
    return v;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        out.push_back(parse_int(text.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Local solvability of polyquadratic twists of X_0(N)", "twistlocal"};
    app.footer(kFooter);
    app.require_subcommand(1);
    Options o;

    auto* verdict = app.add_subcommand("verdict", "Local points at one prime or everywhere");
    verdict->add_option("--m", o.m, "Level factors m_1,...,m_k")->required();
    verdict->add_option("--d", o.d, "Twisting discriminants d_1,...,d_k")->required();
    verdict->add_option("--prime", o.prime, "Evaluate a single prime");
    verdict->add_flag("--trace", o.trace, "Include criterion traces");
    verdict->add_option("--format", o.format, "json");

    auto* search = app.add_subcommand("search", "Enumerate twists with local points everywhere");
    search->add_option("--m", o.m, "Level factors m_1,...,m_k")->required();
    search->add_option("--bound", o.bound, "Max |d_i| (default 100)");
    search->add_option("--limit", o.limit, "Max tuples to emit (default 10)");
    search->add_flag("--sorted", o.sorted, "Emit in canonical order after the search finishes");
    search->add_flag("--trace", o.trace, "Attach verdict traces");
    search->add_option("--format", o.format, "json");

    auto* density = app.add_subcommand("density", "Count biquadratic twists d_2 <= X with local points");
    density->add_option("--m", o.m, "m1,m2")->required();
    density->add_option("--d", o.d, "d1 (default: smallest admissible)");
    density->add_option("--X", o.X, "Count bound")->required();
    density->add_option("--B", o.B, "Prime sample bound for alpha (default 1000000)");
    density->add_option("--threads", o.threads, "Worker threads (default: hardware)");
    density->add_option("--format", o.format, "csv (default) or json");

    auto* cp = app.add_subcommand("classpoly", "Hilbert class polynomial of a discriminant");
    cp->add_option("--disc", o.disc, "Negative discriminant D")->required();
    cp->add_option("--prime", o.prime, "Also report whether H_D has a root mod p");
    cp->add_option("--format", o.format, "json (default: plain polynomial)");

    auto* pic = app.add_subcommand("picard", "Cuspidal orders, Pic^1 verdicts, cuspidal relations");
    pic->add_option("--cusp-order", o.cusp_order, "Order of (0)-(inf) on X_0(N), N prime");
    pic->add_option("--p", o.p, "Prime p for the composite level p*q_1*...*q_r");
    pic->add_option("--qs", o.qs, "Primes q_1,...,q_r");
    pic->add_option("--pic1", o.pic1, "Pic^1 verdict at this prime (with --qs: composite level)");
    pic->add_flag("--inert", o.inert, "The prime is inert in the twisting field");
    pic->add_option("--solve", o.solve, "Solve relations in Z/n for this n");
    pic->add_option("--relations", o.relations, "Relations u:t,... meaning (1-u)P = t");
    pic->add_option("--format", o.format, "json (default: plain)");

    auto* sieve = app.add_subcommand("sieve", "Intersection test on supplied Mordell-Weil sieve data");
    sieve->add_option("--sieve-file", o.sieve_file, "JSON sieve data")->required();
    sieve->add_option("--method", o.method, "auto (default), enumerate or prune");
    sieve->add_option("--format", o.format, "json (default: plain)");

    std::vector<const char*> argv{"twistlocal"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*verdict) return run_verdict(o, out);
        if (*search) return run_search(o, out, err);
        if (*density) return run_density(o, out, err);
        if (*cp) return run_classpoly(o, out);
        if (*pic) return run_picard(o, out);
        if (*sieve) return run_sieve(o, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const MissingInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitNoInput;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const BoundError& e) {
        err << "bound exceeded: " << e.what() << '\n';
        return kExitBound;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace twistlocal::cli
