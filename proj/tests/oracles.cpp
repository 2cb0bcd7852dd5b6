#include "oracles.hpp"

#include <gsl/gsl_errno.h>

namespace mom::oracle {

namespace {

struct FrobeniusData {
  std::vector<Eigen::VectorXd> points;
};

Eigen::VectorXd as_eigen(const gsl_vector* v) {
  Eigen::VectorXd out(v->size);
  for (size_t i = 0; i < v->size; ++i) out[i] = gsl_vector_get(v, i);
  return out;
}

double frob_f(const gsl_vector* v, void* params) {
  const auto* d = static_cast<FrobeniusData*>(params);
  const Eigen::VectorXd x = as_eigen(v);
  double s = 0;
  for (const auto& p : d->points) s += (x - p).norm();
  return s / static_cast<double>(d->points.size());
}

void frob_df(const gsl_vector* v, void* params, gsl_vector* g) {
  const auto* d = static_cast<FrobeniusData*>(params);
  const Eigen::VectorXd x = as_eigen(v);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
  for (const auto& p : d->points) {
    const double r = (x - p).norm();
    if (r > 1e-300) grad += (x - p) / r;
  }
  grad /= static_cast<double>(d->points.size());
  for (Eigen::Index i = 0; i < grad.size(); ++i) gsl_vector_set(g, i, grad[i]);
}

void frob_fdf(const gsl_vector* v, void* params, double* f, gsl_vector* g) {
  *f = frob_f(v, params);
  frob_df(v, params, g);
}

}  // namespace

double frobenius_minimum(const std::vector<Eigen::MatrixXd>& data) {
  gsl_set_error_handler_off();
  FrobeniusData d;
  for (const auto& a : data) d.points.push_back(Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()));
  const size_t n = d.points.front().size();
  gsl_multimin_function_fdf fn{&frob_f, &frob_df, &frob_fdf, n, &d};

  std::vector<Eigen::VectorXd> starts = d.points;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& p : d.points) mean += p;
  starts.push_back(mean / static_cast<double>(d.points.size()));

  double best = std::numeric_limits<double>::infinity();
  for (const auto& s0 : starts) {
    // Nudge off the data point so the gradient exists.
    Eigen::VectorXd start = s0 + 1e-3 * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    gsl_vector* x = gsl_vector_alloc(n);
    for (size_t i = 0; i < n; ++i) gsl_vector_set(x, i, start[i]);
    gsl_multimin_fdfminimizer* m =
        gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
    gsl_multimin_fdfminimizer_set(m, &fn, x, 0.01, 0.1);
    for (int it = 0; it < 5000; ++it) {
      if (gsl_multimin_fdfminimizer_iterate(m)) break;
      if (gsl_multimin_test_gradient(m->gradient, 1e-12) == GSL_SUCCESS) break;
    }
    best = std::min(best, m->f);
    gsl_multimin_fdfminimizer_free(m);
    gsl_vector_free(x);
  }
  return best;
}

}  // namespace mom::oracle
