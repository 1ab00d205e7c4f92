#include "occkit/kernels/losses.hpp"

#include <cmath>
#include <string>

namespace occkit::kernels {

LossResult focal_loss(const std::vector<double>& probs, std::size_t num_classes,
                      const std::vector<Label>& targets, double alpha, double gamma) {
    if (num_classes == 0) throw Error("focal_loss: num_classes must be positive");
    if (probs.size() != targets.size() * num_classes)
        throw Error("focal_loss: probs size " + std::to_string(probs.size()) +
                    " does not match " + std::to_string(targets.size()) + " rows of " +
                    std::to_string(num_classes));
    LossResult res;
    res.grad.assign(probs.size(), 0.0);

    std::size_t counted = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] == kUnknown) continue;
        if (targets[i] >= num_classes)
            throw Error("focal_loss: row " + std::to_string(i) + " target " +
                        std::to_string(int(targets[i])) + " outside " +
                        std::to_string(num_classes) + " classes");
        ++counted;
    }
    if (counted == 0) return res;

    const double inv_n = 1.0 / double(counted);
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] == kUnknown) continue;
        const std::size_t at = i * num_classes + targets[i];
        const double p = probs[at];
        if (!(p > 0.0))
            throw Error("focal_loss: zero probability at target of row " +
                        std::to_string(i) + "; clamp inputs first");
        const double q = 1.0 - p;
        const double qg = std::pow(q, gamma);
        sum += -alpha * qg * std::log(p);
        // d/dp [-a (1-p)^g ln p] = a g (1-p)^(g-1) ln p - a (1-p)^g / p.
        const double dfirst =
            (gamma != 0.0 && q > 0.0) ? alpha * gamma * std::pow(q, gamma - 1.0) *
                                            std::log(p)
                                      : 0.0;
        res.grad[at] = (dfirst - alpha * qg / p) * inv_n;
    }
    res.value = sum * inv_n;
    return res;
}

LossResult l1_flow_loss(const std::vector<double>& pred, const std::vector<double>& gt,
                        const std::vector<std::uint8_t>& mask) {
    if (pred.size() != gt.size() || pred.size() != mask.size() * 2)
        throw Error("l1_flow_loss: pred/gt must hold 2 components per mask entry");
    LossResult res;
    res.grad.assign(pred.size(), 0.0);
    std::size_t n_masked = 0;
    for (std::uint8_t m : mask) n_masked += m != 0;
    if (n_masked == 0) return res;

    const double inv = 1.0 / double(2 * n_masked);
    double sum = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] == 0) continue;
        for (std::size_t c = 0; c < 2; ++c) {
            const double d = pred[i * 2 + c] - gt[i * 2 + c];
            sum += std::fabs(d);
            res.grad[i * 2 + c] = d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0);
        }
    }
    res.value = sum * inv;
    return res;
}

GradCheckResult grad_check(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& point,
                           const std::vector<double>& analytic_grad, double step) {
    if (point.size() != analytic_grad.size())
        throw Error("grad_check: gradient length does not match point");
    if (!(step > 0.0)) throw Error("grad_check: step must be positive");
    GradCheckResult res;
    std::vector<double> probe = point;
    for (std::size_t i = 0; i < point.size(); ++i) {
        probe[i] = point[i] + step;
        const double fp = f(probe);
        probe[i] = point[i] - step;
        const double fm = f(probe);
        probe[i] = point[i];
        const double numeric = (fp - fm) / (2.0 * step);
        const double denom =
            std::max({std::fabs(numeric), std::fabs(analytic_grad[i]), 1e-8});
        const double rel = std::fabs(numeric - analytic_grad[i]) / denom;
        if (rel > res.max_rel_err) {
            res.max_rel_err = rel;
            res.worst_index = i;
        }
    }
    return res;
}

}  // namespace occkit::kernels
