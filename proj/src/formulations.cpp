#include "trackfind/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace trackfind {

namespace {

struct ConstraintSets {
    std::vector<DegreeConstraint> receive;
    std::vector<DegreeConstraint> send;
};

// Receive sets for hits on layers 2..L, send sets for hits on layers 1..L-1.
// A mandatory hit with no candidate at all makes every model unsolvable, so
// the builders reject the instance up front.
ConstraintSets degree_constraints(const Instance& inst) {
    const std::size_t n = static_cast<std::size_t>(inst.num_hits());
    std::vector<std::vector<int>> in(n), out(n);
    for (int s = 0; s < inst.num_segments(); ++s) {
        out[static_cast<std::size_t>(inst.segments[s].from - 1)].push_back(s);
        in[static_cast<std::size_t>(inst.segments[s].to - 1)].push_back(s);
    }
    ConstraintSets sets;
    for (const Hit& h : inst.hits) {
        if (h.layer >= 2) {
            auto& vars = in[static_cast<std::size_t>(h.id - 1)];
            if (vars.empty()) {
                throw std::runtime_error(
                    "structurally infeasible instance: hit " + std::to_string(h.id) +
                    " has no incoming candidate segment");
            }
            sets.receive.push_back({h.id, std::move(vars)});
        }
        if (h.layer <= inst.num_layers - 1) {
            auto& vars = out[static_cast<std::size_t>(h.id - 1)];
            if (vars.empty()) {
                throw std::runtime_error(
                    "structurally infeasible instance: hit " + std::to_string(h.id) +
                    " has no outgoing candidate segment");
            }
            sets.send.push_back({h.id, std::move(vars)});
        }
    }
    return sets;
}

std::vector<QuadraticTerm> objective_terms(const Instance& inst, double alpha) {
    if (inst.triplets.empty()) {
        throw std::runtime_error("structurally infeasible instance: no candidate triplets");
    }
    SegmentLookup lookup(inst);
    std::map<std::pair<int, int>, double> seen;
    std::vector<QuadraticTerm> terms;
    terms.reserve(inst.triplets.size());
    for (const Triplet& t : inst.triplets) {
        const int a = lookup.find(t.i, t.j);
        const int b = lookup.find(t.j, t.k);
        if (a < 0 || b < 0) {
            throw std::runtime_error("triplet references a segment not in the candidate list");
        }
        const auto key = std::minmax(a, b);
        if (!seen.emplace(key, t.cost).second) {
            // Two triplets on one variable pair would silently merge their
            // coefficients; that only happens with corrupted input.
            throw std::runtime_error("duplicate triplet variable pair (" +
                                     std::to_string(key.first) + "," +
                                     std::to_string(key.second) + ")");
        }
        terms.push_back({key.first, key.second, alpha * t.cost});
    }
    return terms;
}

}  // namespace

double QcbmModel::objective_value(const Assignment& x) const {
    if (static_cast<int>(x.size()) != num_vars) {
        throw std::invalid_argument("dimension error: assignment length != num_vars");
    }
    double total = 0.0;
    for (const QuadraticTerm& t : objective) {
        if (x[static_cast<std::size_t>(t.a)] && x[static_cast<std::size_t>(t.b)]) {
            total += t.coeff;
        }
    }
    return total;
}

bool QcbmModel::constraints_satisfied(const Assignment& x) const {
    auto all_one = [&](const std::vector<DegreeConstraint>& cs) {
        for (const DegreeConstraint& c : cs) {
            int degree = 0;
            for (int v : c.vars) degree += x[static_cast<std::size_t>(v)];
            if (degree != 1) return false;
        }
        return true;
    };
    return all_one(receive) && all_one(send);
}

double QuboModel::objective_value(const Assignment& x) const {
    double total = 0.0;
    for (const QuadraticTerm& t : cost_terms) {
        if (x[static_cast<std::size_t>(t.a)] && x[static_cast<std::size_t>(t.b)]) {
            total += t.coeff;
        }
    }
    return total;
}

double QuboModel::penalty_value(const Assignment& x) const {
    return qubo_energy(*this, x) - objective_value(x);
}

double qubo_energy(const QuboModel& model, const Assignment& x) {
    if (static_cast<int>(x.size()) != model.num_vars) {
        throw std::invalid_argument("dimension error: assignment length != num_vars");
    }
    double energy = model.offset;
    for (int v = 0; v < model.num_vars; ++v) {
        if (x[static_cast<std::size_t>(v)]) energy += model.linear[static_cast<std::size_t>(v)];
    }
    for (const QuadraticTerm& t : model.quadratic) {
        if (x[static_cast<std::size_t>(t.a)] && x[static_cast<std::size_t>(t.b)]) {
            energy += t.coeff;
        }
    }
    return energy;
}

QcbmModel build_qcbm(const Instance& inst, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    QcbmModel model;
    model.num_vars = inst.num_segments();
    model.alpha = alpha;
    model.objective = objective_terms(inst, alpha);
    auto sets = degree_constraints(inst);
    model.receive = std::move(sets.receive);
    model.send = std::move(sets.send);
    return model;
}

QuboModel build_qubm(const Instance& inst, double alpha, double gamma) {
    if (!(alpha > 0.0) || !(gamma > 0.0)) {
        throw std::invalid_argument("alpha and gamma must be positive");
    }
    QuboModel model;
    model.num_vars = inst.num_segments();
    model.alpha = alpha;
    model.gamma = gamma;
    model.linear.assign(static_cast<std::size_t>(model.num_vars), 0.0);
    model.cost_terms = objective_terms(inst, alpha);

    std::map<std::pair<int, int>, double> quad;
    for (const QuadraticTerm& t : model.cost_terms) {
        quad[{t.a, t.b}] += t.coeff;
    }
    // Each exactly-one set contributes gamma * (1 - sum x)^2. With binary
    // variables the square expands to gamma * (1 - sum_v x_v + 2 sum_{v<w} x_v x_w).
    auto sets = degree_constraints(inst);
    auto add_penalty = [&](const std::vector<DegreeConstraint>& cs) {
        for (const DegreeConstraint& c : cs) {
            model.offset += gamma;
            for (std::size_t p = 0; p < c.vars.size(); ++p) {
                model.linear[static_cast<std::size_t>(c.vars[p])] -= gamma;
                for (std::size_t q = p + 1; q < c.vars.size(); ++q) {
                    const auto key = std::minmax(c.vars[p], c.vars[q]);
                    quad[key] += 2.0 * gamma;
                }
            }
        }
    };
    add_penalty(sets.receive);
    add_penalty(sets.send);

    model.quadratic.reserve(quad.size());
    for (const auto& [key, coeff] : quad) {
        model.quadratic.push_back({key.first, key.second, coeff});
    }
    return model;
}

BlpModel build_blp(const Instance& inst, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    BlpModel model;
    model.num_x = inst.num_segments();
    model.alpha = alpha;

    const auto terms = objective_terms(inst, alpha);
    model.num_z = static_cast<int>(terms.size());
    model.z_cost.reserve(terms.size());
    model.z_pair.reserve(terms.size());

    auto sets = degree_constraints(inst);
    for (const auto& cs : {sets.receive, sets.send}) {
        for (const DegreeConstraint& c : cs) {
            LinearRow row;
            row.relation = LinearRow::Relation::Eq;
            row.rhs = 1.0;
            for (int v : c.vars) row.terms.emplace_back(v, 1.0);
            model.rows.push_back(std::move(row));
        }
    }
    for (int t = 0; t < model.num_z; ++t) {
        const int xa = terms[static_cast<std::size_t>(t)].a;
        const int xb = terms[static_cast<std::size_t>(t)].b;
        const int z = model.z_index(t);
        model.z_cost.push_back(terms[static_cast<std::size_t>(t)].coeff);
        model.z_pair.emplace_back(xa, xb);
        // x_a + x_b - z <= 1, z <= x_a, z <= x_b, 0 <= z <= 1.
        model.rows.push_back({{{xa, 1.0}, {xb, 1.0}, {z, -1.0}}, LinearRow::Relation::LessEq, 1.0});
        model.rows.push_back({{{z, 1.0}, {xa, -1.0}}, LinearRow::Relation::LessEq, 0.0});
        model.rows.push_back({{{z, 1.0}, {xb, -1.0}}, LinearRow::Relation::LessEq, 0.0});
        model.rows.push_back({{{z, 1.0}}, LinearRow::Relation::LessEq, 1.0});
        model.rows.push_back({{{z, -1.0}}, LinearRow::Relation::LessEq, 0.0});
    }
    return model;
}

double BlpModel::objective_value(const std::vector<double>& z) const {
    if (static_cast<int>(z.size()) != num_z) {
        throw std::invalid_argument("dimension error: z length != num_z");
    }
    double total = 0.0;
    for (int t = 0; t < num_z; ++t) {
        total += z_cost[static_cast<std::size_t>(t)] * z[static_cast<std::size_t>(t)];
    }
    return total;
}

std::vector<double> blp_consistent_z(const BlpModel& model, const Assignment& x) {
    if (static_cast<int>(x.size()) != model.num_x) {
        throw std::invalid_argument("dimension error: assignment length != num_x");
    }
    std::vector<double> z(static_cast<std::size_t>(model.num_z), 0.0);
    for (int t = 0; t < model.num_z; ++t) {
        const auto& [xa, xb] = model.z_pair[static_cast<std::size_t>(t)];
        z[static_cast<std::size_t>(t)] =
            (x[static_cast<std::size_t>(xa)] && x[static_cast<std::size_t>(xb)]) ? 1.0 : 0.0;
    }
    return z;
}

bool blp_rows_satisfied(const BlpModel& model, const Assignment& x,
                        const std::vector<double>& z) {
    auto value = [&](int var) {
        return var < model.num_x
                   ? static_cast<double>(x[static_cast<std::size_t>(var)])
                   : z[static_cast<std::size_t>(var - model.num_x)];
    };
    for (const LinearRow& row : model.rows) {
        double lhs = 0.0;
        for (const auto& [var, coeff] : row.terms) lhs += coeff * value(var);
        const bool ok = row.relation == LinearRow::Relation::Eq
                            ? std::abs(lhs - row.rhs) < 1e-12
                            : lhs <= row.rhs + 1e-12;
        if (!ok) return false;
    }
    return true;
}

FeasibilityReport check_feasible(const Instance& inst, const Assignment& x) {
    if (static_cast<int>(x.size()) != inst.num_segments()) {
        throw std::invalid_argument("dimension error: assignment length != segment count");
    }
    FeasibilityReport report;
    report.in_degree.assign(static_cast<std::size_t>(inst.num_hits()), 0);
    report.out_degree.assign(static_cast<std::size_t>(inst.num_hits()), 0);
    for (int s = 0; s < inst.num_segments(); ++s) {
        if (!x[static_cast<std::size_t>(s)]) continue;
        report.out_degree[static_cast<std::size_t>(inst.segments[s].from - 1)] += 1;
        report.in_degree[static_cast<std::size_t>(inst.segments[s].to - 1)] += 1;
    }
    for (const Hit& h : inst.hits) {
        if (h.layer >= 2 && report.in_degree[static_cast<std::size_t>(h.id - 1)] != 1) {
            report.violations += 1;
        }
        if (h.layer <= inst.num_layers - 1 &&
            report.out_degree[static_cast<std::size_t>(h.id - 1)] != 1) {
            report.violations += 1;
        }
    }
    report.feasible = report.violations == 0;
    return report;
}

}  // namespace trackfind
