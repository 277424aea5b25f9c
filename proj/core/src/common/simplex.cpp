#include "pbo/common/simplex.hpp"

#include <cmath>
#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace pbo {
namespace {

constexpr double kPenalty = 1e10;

struct Context {
  const std::function<double(const Eigen::VectorXd&)>* f;
  Eigen::VectorXd scratch;
  int evaluations = 0;
};

double trampoline(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<Context*>(params);
  for (Eigen::Index i = 0; i < ctx->scratch.size(); ++i) ctx->scratch[i] = gsl_vector_get(v, static_cast<size_t>(i));
  ++ctx->evaluations;
  const double value = (*ctx->f)(ctx->scratch);
  return std::isfinite(value) ? value : kPenalty;
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace

SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                               double initial_step, int max_evaluations, double size_tolerance) {
  const auto n = static_cast<size_t>(x0.size());
  Context ctx{&f, Eigen::VectorXd(x0.size()), 0};
  SimplexResult result;
  if (n == 0) {
    result.x = x0;
    result.value = f(x0);
    result.evaluations = 1;
    result.converged = true;
    return result;
  }

  // GSL's default handler aborts; errors are reported through return codes instead.
  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> steps(gsl_vector_alloc(n));
  for (size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, x0[static_cast<Eigen::Index>(i)]);
  gsl_vector_set_all(steps.get(), initial_step);

  gsl_multimin_function fn{&trampoline, n, &ctx};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), steps.get());

  while (ctx.evaluations < max_evaluations) {
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), size_tolerance) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
  }

  result.x.resize(x0.size());
  const gsl_vector* best = gsl_multimin_fminimizer_x(s.get());
  for (size_t i = 0; i < n; ++i) result.x[static_cast<Eigen::Index>(i)] = gsl_vector_get(best, i);
  result.value = gsl_multimin_fminimizer_minimum(s.get());
  result.evaluations = ctx.evaluations;
  gsl_set_error_handler(previous);
  return result;
}

}  // namespace pbo
