#include "twistlocal/errors.hpp"
#include "twistlocal/localpoints.hpp"

namespace twistlocal::localpoints {

using nlohmann::json;

json to_json(const TraceEntry& e) {
    json j{{"criterion", e.criterion}, {"outcome", e.outcome}};
    if (!e.detail.empty()) j["detail"] = e.detail;
    return j;
}

json to_json(const PrimeVerdict& v) {
    json trace = json::array();
    for (const auto& e : v.trace) trace.push_back(to_json(e));
    return json{{"p", v.p}, {"status", std::string(to_string(v.status))}, {"trace", std::move(trace)}};
}

json to_json(const AggregateVerdict& a) {
    json verdicts = json::array();
    for (const auto& v : a.verdicts) verdicts.push_back(to_json(v));
    return json{{"status", std::string(to_string(a.status))},
                {"unknown_primes", a.unknown_primes},
                {"checked_primes", a.checked_primes},
                {"tail", to_json(a.tail)},
                {"verdicts", std::move(verdicts)}};
}

namespace {

Status status_from(const json& j) {
    auto s = parse_status(j.get<std::string>());
    if (!s) throw DomainError("unknown verdict status " + j.dump());
    return *s;
}

TraceEntry trace_entry_from(const json& j) {
    return TraceEntry{j.at("criterion").get<std::string>(), j.at("outcome").get<std::string>(), j.value("detail", std::string{})};
}

}  // namespace

PrimeVerdict prime_verdict_from_json(const json& j) {
    PrimeVerdict v;
    v.p = j.at("p").get<std::int64_t>();
    v.status = status_from(j.at("status"));
    for (const auto& e : j.at("trace")) v.trace.push_back(trace_entry_from(e));
    return v;
}

AggregateVerdict aggregate_from_json(const json& j) {
    AggregateVerdict a;
    a.status = status_from(j.at("status"));
    a.unknown_primes = j.at("unknown_primes").get<std::vector<std::int64_t>>();
    a.checked_primes = j.at("checked_primes").get<std::vector<std::int64_t>>();
    if (j.contains("tail")) a.tail = trace_entry_from(j.at("tail"));
    for (const auto& v : j.at("verdicts")) a.verdicts.push_back(prime_verdict_from_json(v));
    return a;
}

}  // namespace twistlocal::localpoints
