#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "occkit/types.hpp"

namespace occkit::kernels {

struct LossResult {
    double value = 0.0;
    std::vector<double> grad;  // same layout as the differentiated input
};

// Focal loss over per-voxel class probabilities, probs laid out row-major
// n x num_classes with the target label code indexing the column. Rows whose
// target is 255 are skipped. Value is the mean over counted rows of
// -alpha * (1 - p_t)^gamma * log(p_t); the gradient is with respect to probs
// and is nonzero only at target entries. Callers own the contract that rows
// are probabilities (entries in (0,1], each row summing to 1); it is not
// re-checked here so that finite-difference probes stay valid. A zero
// probability at a target faults.
LossResult focal_loss(const std::vector<double>& probs, std::size_t num_classes,
                      const std::vector<Label>& targets, double alpha, double gamma);

// Mean absolute flow error over masked voxels, layout n x 2 (dx, dy), the
// mean taken over both components of every masked voxel. Gradient is the sign
// subgradient, 0 at ties. An empty mask gives loss 0.
LossResult l1_flow_loss(const std::vector<double>& pred, const std::vector<double>& gt,
                        const std::vector<std::uint8_t>& mask);

// Central-difference check of an analytic gradient: perturbs each coordinate
// by +-step and compares. Relative error uses denominator
// max(|analytic|, |numeric|, 1e-8).
struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t worst_index = 0;
};

GradCheckResult grad_check(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& point,
                           const std::vector<double>& analytic_grad, double step);

}  // namespace occkit::kernels
