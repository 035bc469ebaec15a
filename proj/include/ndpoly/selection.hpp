#pragma once

#include <string>
#include <vector>

#include "ndpoly/svm.hpp"
#include "ndpoly/types.hpp"

namespace ndpoly {

enum class SelectionMethod { SelectKBest, Rfe, L1Svm };

std::string to_string(SelectionMethod method);
SelectionMethod selection_method_from_string(const std::string& name);

// SelectKBest orders indices by descending F with ties broken by ascending
// index; rfe and l1_select return survivors in ascending index order. scores
// carries the F statistic (SelectKBest) or |w| on standardized features
// (rfe, l1_select) per selected index; it may be empty when no model was
// trained.
struct SelectionResult {
  SelectionMethod method = SelectionMethod::SelectKBest;
  std::vector<Index> indices;
  std::vector<double> scores;
};

// Two-class ANOVA F statistic: between-class sum of squares over
// within-class sum of squares scaled by its N-2 degrees of freedom.
// Conventions: zero between-class variance gives F = 0 regardless of the
// denominator; zero within-class variance with nonzero between gives +inf
// so perfectly separating constants rank first.
double anova_f(const Eigen::Ref<const Vector>& column,
               const Eigen::Ref<const Labels>& labels);

Vector anova_f_all(const Eigen::Ref<const Matrix>& features,
                   const Eigen::Ref<const Labels>& labels);

SelectionResult select_k_best(const Eigen::Ref<const Matrix>& features,
                              const Eigen::Ref<const Labels>& labels, Index k);

// Recursive feature elimination: trains an L2 linear SVM on the standardized
// surviving columns and drops the step smallest-|w| features each round,
// never dropping below k. Ties on |w| eliminate the larger index first.
// size_trace, when given, records the survivor count before each round and
// the final count.
SelectionResult rfe(const Eigen::Ref<const Matrix>& features,
                    const Eigen::Ref<const Labels>& labels, Index k, Index step = 1,
                    const SvmOptions& svm = {}, std::vector<Index>* size_trace = nullptr);

// L1-penalized selection: trains the L1 hinge model on standardized features
// and keeps indices with |w_j| > zero_tol. Throws ConvergenceError when the
// solver hits its epoch cap.
SelectionResult l1_select(const Eigen::Ref<const Matrix>& features,
                          const Eigen::Ref<const Labels>& labels, double c,
                          double zero_tol = 1e-6, const SvmOptions& svm = {});

// Searches c geometrically over [1e-4, 1e4] for the largest selection of
// size <= k: a coarse half-decade scan followed by bisection of the first
// crossing beyond k. The support is not monotone in c (one separating column
// can reabsorb the others as the penalty weakens), which is why a plain
// endpoint bisection is not enough. Falls back to the k largest |w| under
// the strongest penalty if even that keeps more than k features.
SelectionResult l1_select_k(const Eigen::Ref<const Matrix>& features,
                            const Eigen::Ref<const Labels>& labels, Index k,
                            double zero_tol = 1e-6, const SvmOptions& svm = {});

}  // namespace ndpoly
