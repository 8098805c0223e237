// Copyright 2026 The dp_resample Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings for the core operations.

#include <cstdint>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dp_resample/accountant.h"
#include "dp_resample/baselines.h"
#include "dp_resample/distributions.h"
#include "dp_resample/errors.h"
#include "dp_resample/harness.h"
#include "dp_resample/mechanisms.h"
#include "dp_resample/privsub.h"

namespace py = pybind11;

namespace dp_resample {
namespace {

py::dict BudgetDict(const PrivSubBudget& b) {
  const PrivacyBudget amp = AmplifiedPerSubsample(b);
  const PrivacyBudget total = PrivSubTotal(b);
  py::dict d;
  d["epsilon"] = b.center.epsilon;
  d["delta"] = b.center.delta;
  d["epsilon_prime"] = b.per_subsample.epsilon;
  d["delta_prime"] = b.per_subsample.delta;
  d["epsilon_amp"] = amp.epsilon;
  d["delta_amp"] = amp.delta;
  d["total_epsilon"] = total.epsilon;
  d["total_delta"] = total.delta;
  d["m"] = b.m;
  d["n"] = b.n;
  d["T"] = b.num_subsamples;
  return d;
}

py::dict ResultDict(const SubsamplingResult& r) {
  py::dict d;
  d["lower"] = r.ci.lower;
  d["upper"] = r.ci.upper;
  d["center"] = r.estimates.center;
  d["estimates"] = r.estimates.estimates;
  d["cdf_points"] = r.cdf.points();
  return d;
}

std::size_t DefaultM(std::size_t m, std::size_t n) {
  return m != 0 ? m : SizeRule::Power(2.0 / 3.0).EvaluateCount(n);
}

py::dict PyPrivSub(const std::vector<double>& data, double lo, double hi,
                   std::size_t m, std::size_t num_subsamples, double alpha,
                   double eps_total, double delta, double split,
                   const std::string& mode, const std::string& mechanism,
                   uint64_t seed) {
  const std::size_t n = data.size();
  m = DefaultM(m, n);
  const SubsamplingPlan plan = SubsamplingPlan::WithSqrtRate(n, m, num_subsamples, alpha);
  plan.Validate();
  const PrivSubBudget budgets =
      Calibrate(PrivacyBudget::Make(eps_total, delta), m, n, num_subsamples, split,
                ParseCompositionKind(mode));
  const Mechanism mech = Mechanism::FromName(mechanism, BoundedRange::Make(lo, hi));
  py::dict d = ResultDict(RunPrivSub(data, plan, mech, budgets, seed));
  d["budget"] = BudgetDict(budgets);
  return d;
}

py::dict PyNonPrivate(const std::vector<double>& data, std::size_t m,
                      std::size_t num_subsamples, double alpha,
                      const std::string& statistic, uint64_t seed) {
  const std::size_t n = data.size();
  const SubsamplingPlan plan =
      SubsamplingPlan::WithSqrtRate(n, DefaultM(m, n), num_subsamples, alpha);
  plan.Validate();
  return ResultDict(RunNonPrivateSubsampling(data, plan, ParseStatistic(statistic), seed));
}

py::tuple Pair(const ConfidenceInterval& ci) { return py::make_tuple(ci.lower, ci.upper); }

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Differentially private confidence intervals by subsampling.";

  py::object base = py::reinterpret_borrow<py::object>(PyExc_ValueError);
  static py::exception<Error> error(mod, "Error", base.ptr());
  static py::exception<DomainError> domain_error(mod, "DomainError", error.ptr());
  static py::exception<ParameterError> parameter_error(mod, "ParameterError", error.ptr());
  static py::exception<PlanError> plan_error(mod, "PlanError", error.ptr());
  static py::exception<ConfigError> config_error(mod, "ConfigError", error.ptr());
  static py::exception<IoError> io_error(mod, "IoError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      domain_error(e.what());
    } catch (const ParameterError& e) {
      parameter_error(e.what());
    } catch (const PlanError& e) {
      plan_error(e.what());
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const IoError& e) {
      io_error(e.what());
    } catch (const Error& e) {
      error(e.what());
    }
  });

  mod.def(
      "sample",
      [](const std::string& spec_json, std::size_t n, uint64_t seed) {
        return Sample(ParseDistributionSpec(spec_json), n, seed).values;
      },
      py::arg("spec_json"), py::arg("n"), py::arg("seed"),
      "Draw n values from a distribution given as a JSON record.");
  mod.def(
      "true_quantile",
      [](const std::string& spec_json, double q) {
        return TrueQuantile(ParseDistributionSpec(spec_json), q);
      },
      py::arg("spec_json"), py::arg("q"));
  mod.def(
      "true_mean",
      [](const std::string& spec_json) { return TrueMean(ParseDistributionSpec(spec_json)); },
      py::arg("spec_json"));

  mod.def(
      "amplify",
      [](double eps, double delta, std::size_t m, std::size_t n) {
        const PrivacyBudget b = Amplify(PrivacyBudget::Make(eps, delta), m, n);
        return py::make_tuple(b.epsilon, b.delta);
      },
      py::arg("epsilon"), py::arg("delta"), py::arg("m"), py::arg("n"));
  mod.def(
      "calibrate",
      [](double eps_total, double delta_total, std::size_t m, std::size_t n,
         std::size_t num_subsamples, double split, const std::string& mode) {
        return BudgetDict(Calibrate(PrivacyBudget::Make(eps_total, delta_total), m, n,
                                    num_subsamples, split, ParseCompositionKind(mode)));
      },
      py::arg("eps_total"), py::arg("delta_total"), py::arg("m"), py::arg("n"),
      py::arg("T") = 50, py::arg("split") = 0.5, py::arg("mode") = "basic");

  mod.def("median", [](const std::vector<double>& data) { return Median(data); },
          py::arg("data"));
  mod.def(
      "inverse_sensitivity_median",
      [](const std::vector<double>& data, double lo, double hi, double eps, uint64_t seed) {
        Rng rng(seed);
        return InverseSensitivityMedian(data, BoundedRange::Make(lo, hi),
                                        PrivacyBudget::Make(eps), rng);
      },
      py::arg("data"), py::arg("lo"), py::arg("hi"), py::arg("epsilon"), py::arg("seed"));

  mod.def("run_privsub", &PyPrivSub, py::arg("data"), py::arg("lo"), py::arg("hi"),
          py::arg("m") = 0, py::arg("T") = 50, py::arg("alpha") = 0.1,
          py::arg("eps_total") = 5.0, py::arg("delta") = 0.0, py::arg("split") = 0.5,
          py::arg("mode") = "basic", py::arg("mechanism") = "inverse_sensitivity_median",
          py::arg("seed") = 0,
          "Private subsampling interval; m = 0 means ceil(n^(2/3)).");
  mod.def("run_nonprivate_subsampling", &PyNonPrivate, py::arg("data"), py::arg("m") = 0,
          py::arg("T") = 50, py::arg("alpha") = 0.1, py::arg("statistic") = "median",
          py::arg("seed") = 0);

  mod.def(
      "bootstrap_ci",
      [](const std::vector<double>& data, const std::string& statistic, double alpha,
         uint64_t seed) { return Pair(BootstrapCi(data, ParseStatistic(statistic), alpha, seed)); },
      py::arg("data"), py::arg("statistic") = "median", py::arg("alpha") = 0.1,
      py::arg("seed") = 0);
  mod.def(
      "sample_splitting_ci",
      [](const std::vector<double>& data, double lo, double hi, std::size_t num_splits,
         double eps, double alpha, const std::string& mechanism, uint64_t seed) {
        const SplitPlan plan = SplitPlan::ForData(data.size(), num_splits, alpha);
        plan.Validate(data.size());
        return Pair(SampleSplittingCi(data, plan,
                                      Mechanism::FromName(mechanism, BoundedRange::Make(lo, hi)),
                                      PrivacyBudget::Make(eps), seed));
      },
      py::arg("data"), py::arg("lo"), py::arg("hi"), py::arg("num_splits"),
      py::arg("epsilon") = 5.0, py::arg("alpha") = 0.1,
      py::arg("mechanism") = "inverse_sensitivity_median", py::arg("seed") = 0);
  mod.def(
      "expmech_median_ci",
      [](const std::vector<double>& data, double lo, double hi, double eps, double alpha,
         double granularity, uint64_t seed) {
        return Pair(ExpMechMedianCi(data, BoundedRange::Make(lo, hi), PrivacyBudget::Make(eps),
                                    alpha, granularity, seed));
      },
      py::arg("data"), py::arg("lo"), py::arg("hi"), py::arg("epsilon") = 5.0,
      py::arg("alpha") = 0.1, py::arg("granularity") = 1e-3, py::arg("seed") = 0);

  mod.def(
      "run_coverage",
      [](const std::string& config_json, std::size_t workers) {
        const ExperimentConfig config = ParseExperimentConfig(config_json);
        py::gil_scoped_release release;
        return FormatCoverageCsv(RunCoverage(config, workers));
      },
      py::arg("config_json"), py::arg("workers") = 1,
      "Run a coverage experiment from a JSON config and return the CSV text.");
  mod.def(
      "run_cdf",
      [](const std::string& config_json, std::size_t workers) {
        const ExperimentConfig config = ParseExperimentConfig(config_json);
        py::gil_scoped_release release;
        return FormatCdfCsv(RunCdfConvergence(config, workers));
      },
      py::arg("config_json"), py::arg("workers") = 1);
}

}  // namespace
}  // namespace dp_resample
