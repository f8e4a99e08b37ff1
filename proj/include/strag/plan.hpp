#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strag/common.hpp"
#include "strag/sparse_matrix.hpp"

namespace strag {

enum class PlanKind { matvec, matmat };

inline std::string to_string(PlanKind k) { return k == PlanKind::matvec ? "matvec" : "matmat"; }

inline PlanKind plan_kind_from_string(const std::string& s) {
    if (s == "matvec") return PlanKind::matvec;
    if (s == "matmat") return PlanKind::matmat;
    throw parameter_error("unknown plan kind: " + s);
}

// One worker's storage: ell_a encoded block-columns of A and (for matmat)
// ell_b encoded block-columns of B. The worker's task list is the row-major
// cross product: task t pairs a_vecs[t / ell_b] with b_vecs[t % ell_b], so
// coefficient vectors are shared across the tasks they participate in.
struct WorkerPlan {
    std::vector<CoefficientVector> a_vecs;
    std::vector<CoefficientVector> b_vecs;  // empty for matvec
};

// A materialized (a, b) coefficient pair for one task.
struct Task {
    const CoefficientVector* a = nullptr;
    const CoefficientVector* b = nullptr;  // null for matvec
    long position = 0;                     // 0 = top of the worker's list
};

struct EncodingPlan {
    PlanKind kind = PlanKind::matvec;
    std::string scheme_id;
    long n = 0;
    long delta_a = 0;
    long delta_b = 1;  // 1 for matvec
    long ell_a = 0;
    long ell_b = 1;
    std::uint64_t seed = 0;
    std::vector<WorkerPlan> workers;

    long ell() const { return ell_a * ell_b; }
    long delta() const { return delta_a * delta_b; }

    Task task(long worker, long t) const {
        const WorkerPlan& w = workers[worker];
        if (kind == PlanKind::matvec) return Task{&w.a_vecs[t], nullptr, t};
        return Task{&w.a_vecs[t / ell_b], &w.b_vecs[t % ell_b], t};
    }

    void validate() const {
        if (n <= 0 || static_cast<long>(workers.size()) != n)
            throw shape_error("plan must carry one entry per worker");
        if (kind == PlanKind::matvec && delta_b != 1)
            throw shape_error("matvec plan requires delta_b == 1");
        std::vector<bool> touched(delta(), false);
        for (const auto& w : workers) {
            if (static_cast<long>(w.a_vecs.size()) != ell_a)
                throw shape_error("worker with wrong number of A vectors");
            if (kind == PlanKind::matvec) {
                if (!w.b_vecs.empty()) throw shape_error("matvec worker carries B vectors");
            } else if (static_cast<long>(w.b_vecs.size()) != ell_b) {
                throw shape_error("worker with wrong number of B vectors");
            }
            for (const auto& v : w.a_vecs) {
                if (v.length != delta_a) throw shape_error("A vector with wrong length");
                if (kind == PlanKind::matvec)
                    for (long s : v.support) touched[s] = true;
            }
            for (const auto& v : w.b_vecs)
                if (v.length != delta_b) throw shape_error("B vector with wrong length");
            if (kind == PlanKind::matmat) {
                for (const auto& va : w.a_vecs)
                    for (const auto& vb : w.b_vecs)
                        for (long sa : va.support)
                            for (long sb : vb.support) touched[sa * delta_b + sb] = true;
            }
        }
        for (long u = 0; u < delta(); ++u)
            if (!touched[u])
                throw shape_error("unknown " + std::to_string(u) + " is touched by no task");
    }
};

// ---------------------------------------------------------------------------
// JSON round trip. Values serialize as decimal doubles that reparse exactly.
// ---------------------------------------------------------------------------

inline nlohmann::json coefficient_vector_to_json(const CoefficientVector& v) {
    return nlohmann::json{{"length", v.length}, {"support", v.support}, {"values", v.values}};
}

inline CoefficientVector coefficient_vector_from_json(const nlohmann::json& j) {
    return CoefficientVector(j.at("length").get<long>(), j.at("support").get<std::vector<long>>(),
                             j.at("values").get<std::vector<double>>());
}

inline nlohmann::json plan_to_json(const EncodingPlan& plan) {
    nlohmann::json j;
    j["kind"] = to_string(plan.kind);
    j["scheme_id"] = plan.scheme_id;
    j["n"] = plan.n;
    j["delta_a"] = plan.delta_a;
    j["delta_b"] = plan.delta_b;
    j["ell_a"] = plan.ell_a;
    j["ell_b"] = plan.ell_b;
    j["seed"] = plan.seed;
    j["workers"] = nlohmann::json::array();
    for (const auto& w : plan.workers) {
        nlohmann::json jw;
        jw["a"] = nlohmann::json::array();
        for (const auto& v : w.a_vecs) jw["a"].push_back(coefficient_vector_to_json(v));
        jw["b"] = nlohmann::json::array();
        for (const auto& v : w.b_vecs) jw["b"].push_back(coefficient_vector_to_json(v));
        j["workers"].push_back(jw);
    }
    return j;
}

inline EncodingPlan plan_from_json(const nlohmann::json& j) {
    EncodingPlan plan;
    plan.kind = plan_kind_from_string(j.at("kind").get<std::string>());
    plan.scheme_id = j.at("scheme_id").get<std::string>();
    plan.n = j.at("n").get<long>();
    plan.delta_a = j.at("delta_a").get<long>();
    plan.delta_b = j.at("delta_b").get<long>();
    plan.ell_a = j.at("ell_a").get<long>();
    plan.ell_b = j.at("ell_b").get<long>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jw : j.at("workers")) {
        WorkerPlan w;
        for (const auto& jv : jw.at("a")) w.a_vecs.push_back(coefficient_vector_from_json(jv));
        for (const auto& jv : jw.at("b")) w.b_vecs.push_back(coefficient_vector_from_json(jv));
        plan.workers.push_back(std::move(w));
    }
    plan.validate();
    return plan;
}

inline void save_plan(const std::string& path, const EncodingPlan& plan) {
    std::ofstream f(path);
    if (!f) throw parameter_error("cannot open for writing: " + path);
    f << plan_to_json(plan).dump(2) << "\n";
}

inline EncodingPlan load_plan(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parameter_error("cannot open for reading: " + path);
    nlohmann::json j;
    f >> j;
    return plan_from_json(j);
}

}  // namespace strag
