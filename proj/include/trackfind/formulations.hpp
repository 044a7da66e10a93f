#pragma once

#include <utility>
#include <vector>

#include "trackfind/instance.hpp"

namespace trackfind {

/// One coeff * x_a * x_b product over segment variables.
struct QuadraticTerm {
    int a = 0;
    int b = 0;
    double coeff = 0.0;
};

/// Exactly-one constraint: the listed variables must sum to 1.
struct DegreeConstraint {
    int hit = 0;
    std::vector<int> vars;
};

/// Quadratic objective over binary segment variables with hard exactly-one
/// degree constraints. Every hit above the first layer must receive exactly
/// one selected segment; every hit below the last layer must send exactly one.
struct QcbmModel {
    int num_vars = 0;
    double alpha = 0.0;
    std::vector<QuadraticTerm> objective;   // one alpha*cost term per triplet
    std::vector<DegreeConstraint> receive;  // hits on layers 2..L
    std::vector<DegreeConstraint> send;     // hits on layers 1..L-1

    double objective_value(const Assignment& x) const;
    bool constraints_satisfied(const Assignment& x) const;
};

/// Unconstrained penalty form of the same problem. Violating a degree
/// constraint by d costs gamma * d^2, so the energy of a feasible assignment
/// reduces to the quadratic objective alone.
struct QuboModel {
    int num_vars = 0;
    double alpha = 0.0;
    double gamma = 0.0;
    double offset = 0.0;
    std::vector<double> linear;
    std::vector<QuadraticTerm> quadratic;    // canonical a < b, sorted, unique
    std::vector<QuadraticTerm> cost_terms;   // objective part, kept separately

    /// alpha-scaled cost of the selected triplets (no penalties).
    double objective_value(const Assignment& x) const;
    /// Penalty part of the energy; nonnegative, zero exactly when feasible.
    double penalty_value(const Assignment& x) const;
};

/// offset + linear + quadratic evaluated on a bit vector of length num_vars.
double qubo_energy(const QuboModel& model, const Assignment& x);

/// Sparse constraint row: sum of coeff * var (relation) rhs.
struct LinearRow {
    enum class Relation { LessEq, Eq };
    std::vector<std::pair<int, double>> terms;
    Relation relation = Relation::LessEq;
    double rhs = 0.0;
};

/// Linearized program: one x variable per segment, one z variable per
/// triplet with z = x_a * x_b enforced by the product-linearization rows.
/// Variables 0..num_x-1 are the x's, num_x..num_x+num_z-1 the z's.
struct BlpModel {
    int num_x = 0;
    int num_z = 0;
    double alpha = 0.0;
    std::vector<double> z_cost;               // objective coefficient per z
    std::vector<std::pair<int, int>> z_pair;  // (x_a, x_b) behind each z
    std::vector<LinearRow> rows;              // degree rows then product rows

    int z_index(int t) const { return num_x + t; }
    double objective_value(const std::vector<double>& z) const;
};

QcbmModel build_qcbm(const Instance& inst, double alpha);
QuboModel build_qubm(const Instance& inst, double alpha, double gamma);
BlpModel build_blp(const Instance& inst, double alpha);

/// The z values forced by the product rows for a fixed binary x.
std::vector<double> blp_consistent_z(const BlpModel& model, const Assignment& x);

/// True when every row of the model holds for (x, z).
bool blp_rows_satisfied(const BlpModel& model, const Assignment& x,
                        const std::vector<double>& z);

/// Per-hit selected in/out degrees for an assignment.
struct FeasibilityReport {
    bool feasible = false;
    int violations = 0;              // mandatory degrees different from 1
    std::vector<int> in_degree;      // indexed by hit id - 1
    std::vector<int> out_degree;
};

FeasibilityReport check_feasible(const Instance& inst, const Assignment& x);

}  // namespace trackfind
