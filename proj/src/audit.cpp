#include <map>
#include <memory>

#include <fmt/format.h>

#include "cufair/io.hpp"

namespace cufair {

namespace {

const std::string* text_param(const MetricRequest& r, const char* key) {
  auto it = r.params.find(key);
  if (it == r.params.end()) return nullptr;
  return std::get_if<std::string>(&it->second);
}

double number_param(const MetricRequest& r, const char* key) {
  return std::get<double>(r.params.at(key));
}

std::string describe(const AttributeValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return fmt::format("{:g}", *d);
  return std::get<std::string>(v);
}

MetricSpec core_spec(MetricKind kind, const MetricRequest& r) {
  switch (kind) {
    case MetricKind::ConditionalDemPar: {
      const std::string attribute = *text_param(r, "attribute");
      const AttributeValue value = r.params.at("value");
      return MetricSpec::conditional(LegitimateStratum{
          [attribute, value](const Individual& ind) {
            const AttributeValue* v = ind.attrs.find(attribute);
            return v != nullptr && *v == value;
          },
          fmt::format("{}={}", attribute, describe(value))});
    }
    case MetricKind::EqOppStatic: {
      const std::string* attr = text_param(r, "attribute");
      const std::string attribute = attr ? *attr : "p0";
      return MetricSpec::eq_opp_static(StaticQualification{
          number_param(r, "alpha"),
          [attribute](const Individual& ind) {
            return ind.attrs.number(attribute);
          }});
    }
    default:
      return MetricSpec::of(kind);
  }
}

/// Dispatches metric requests for one loaded scenario.
class Runner {
 public:
  virtual ~Runner() = default;
  virtual FairnessVerdict run(const MetricRequest& r,
                              const MetricOptions& opts) const = 0;
};

template <class Algorithm>
class FdmpRunner : public Runner {
 public:
  FdmpRunner(Fdmp<Algorithm> fdmp, Algorithm audited)
      : fdmp_(std::move(fdmp)), audited_(std::move(audited)) {}

  FairnessVerdict run(const MetricRequest& r,
                      const MetricOptions& opts) const override {
    if (const auto kind = parse_metric_kind(r.name)) {
      return evaluate_multi_group(fdmp_, audited_, core_spec(*kind, r), opts);
    }
    return run_extra(r, opts);
  }

 protected:
  virtual FairnessVerdict run_extra(const MetricRequest& r,
                                    const MetricOptions&) const {
    throw InvalidArgument(fmt::format("metric '{}' is not available", r.name));
  }

  Fdmp<Algorithm> fdmp_;
  Algorithm audited_;
};

// Table of observed predictions, one per distinct input.
struct RecordedPredictions {
  Slcp slcp;
  ClassifierTable table;
  Classifier classifier;
};

RecordedPredictions recorded_predictions(const ClassificationPayload& p) {
  std::vector<LabeledExample> examples;
  std::size_t groups = 2;
  for (const auto& row : p.rows) {
    examples.push_back(
        LabeledExample{row.features, row.y, GroupId{row.group}, row.weight});
    groups = std::max<std::size_t>(groups, row.group + 1);
  }
  Slcp slcp(std::move(examples), groups);
  ClassifierTable table(slcp.input_count(), 2);
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    auto& slot = table[slcp.input_of(i)];
    const auto yhat = static_cast<std::uint8_t>(p.rows[i].yhat);
    if (slot != 2 && slot != yhat) {
      throw SchemaError(fmt::format("payload.rows[{}].yhat", i),
                        "conflicting predictions for identical inputs");
    }
    slot = yhat;
  }
  auto lookup = std::make_shared<
      std::map<std::pair<std::vector<double>, std::uint32_t>, int>>();
  for (std::size_t k = 0; k < slcp.input_count(); ++k) {
    const auto& e = slcp.examples()[slcp.input_representative(k)];
    (*lookup)[{e.features, e.group.value}] = table[k];
  }
  Classifier classifier = [lookup](std::span<const double> x, GroupId z) {
    return lookup->at({std::vector<double>(x.begin(), x.end()), z.value});
  };
  return RecordedPredictions{std::move(slcp), std::move(table),
                             std::move(classifier)};
}

FairnessVerdict classic(const MetricRequest& r, const Slcp& slcp,
                        const Classifier& clf, const MetricOptions& opts) {
  if (r.name == "dem_par_clf") return classic_dem_par(slcp, clf, opts);
  if (r.name == "eq_opp_clf") return classic_eq_opp(slcp, clf, opts);
  throw InvalidArgument(fmt::format("metric '{}' is not available", r.name));
}

class ClassificationRunner : public FdmpRunner<ClassifierTable> {
 public:
  ClassificationRunner(RecordedPredictions recorded, Fdmp<ClassifierTable> fdmp)
      : FdmpRunner(std::move(fdmp), recorded.table),
        recorded_(std::move(recorded)) {}

 protected:
  FairnessVerdict run_extra(const MetricRequest& r,
                            const MetricOptions& opts) const override {
    return classic(r, recorded_.slcp, recorded_.classifier, opts);
  }

 private:
  RecordedPredictions recorded_;
};

class StrataRunner : public FdmpRunner<DecisionTable> {
 public:
  StrataRunner(const StrataPopulation& pop, StrataFdmp strata)
      : FdmpRunner(std::move(strata.fdmp), strata.recorded),
        slcp_(strata_to_slcp(pop)) {}

 protected:
  FairnessVerdict run_extra(const MetricRequest& r,
                            const MetricOptions& opts) const override {
    if (r.name == "principal_fairness") {
      StrataFdmp view{Fdmp<DecisionTable>{fdmp_}, audited_};
      return principal_fairness(view, audited_, opts);
    }
    return classic(r, slcp_.slcp, slcp_.recorded, opts);
  }

 private:
  StrataSlcp slcp_;
};

class MdpRunner : public FdmpRunner<Policy> {
 public:
  MdpRunner(EpisodicMdp mdp, StateActionTable welfare, Policy policy,
            Thresholds thresholds)
      : FdmpRunner(mdp_to_fdmp(mdp, welfare, thresholds), policy),
        mdp_(std::move(mdp)),
        welfare_(std::move(welfare)) {}

 protected:
  FairnessVerdict run_extra(const MetricRequest& r,
                            const MetricOptions& opts) const override {
    const std::string* attr = text_param(r, "attribute");
    return eq_opp_mdp_static(mdp_, welfare_, audited_, number_param(r, "alpha"),
                             attr ? *attr : "p0", opts);
  }

 private:
  EpisodicMdp mdp_;
  StateActionTable welfare_;
};

std::unique_ptr<Runner> make_runner(const ScenarioFile& s, Thresholds th) {
  switch (s.kind) {
    case ScenarioKind::Classification: {
      const auto& p = std::get<ClassificationPayload>(s.payload);
      RecordedPredictions recorded = recorded_predictions(p);
      auto fdmp =
          p.welfare == ClassificationWelfare::GermanCredit
              ? german_credit_fdmp(recorded.slcp, th.tau, th.rho)
              : classification_fdmp(
                    recorded.slcp,
                    [](int, int yhat) { return static_cast<double>(yhat); },
                    zero_one_loss, th);
      return std::make_unique<ClassificationRunner>(std::move(recorded),
                                                    std::move(fdmp));
    }
    case ScenarioKind::Strata: {
      const StrataPopulation pop(std::get<StrataPayload>(s.payload).counts);
      return std::make_unique<StrataRunner>(pop, strata_to_fdmp(pop, th));
    }
    case ScenarioKind::Mdp: {
      const auto& p = std::get<MdpPayload>(s.payload);
      return std::make_unique<MdpRunner>(p.model(), p.welfare, p.policy, th);
    }
    case ScenarioKind::Clustering: {
      const auto& p = std::get<ClusteringPayload>(s.payload);
      ClusteringProblem problem(p.features, p.groups, p.k);
      ClusterWelfare welfare = BalancedWelfare{};
      if (p.representative) welfare = RepresentativeWelfare{};
      return std::make_unique<FdmpRunner<ClusterAssignment>>(
          clustering_to_fdmp(problem, welfare, th), p.assignment);
    }
  }
  throw InvalidArgument("unknown scenario kind");
}

ReportError error_of(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return ReportError{err->kind(), err->what()};
  }
  return ReportError{"Error", e.what()};
}

}  // namespace

bool AuditReport::all_fair() const {
  for (const auto& r : results) {
    if (r.error) return false;
    if (r.verdict && !r.verdict->vacuous && !r.verdict->satisfied) return false;
  }
  return true;
}

AuditReport run_audit(const ScenarioFile& scenario, const AuditFlags& flags) {
  AuditReport report;
  report.scenario = scenario.id;
  report.epsilon = flags.epsilon.value_or(scenario.epsilon.value_or(kDefaultEpsilon));

  Thresholds th = default_thresholds(scenario);
  th.tau = flags.tau.value_or(scenario.tau.value_or(th.tau));
  th.rho = flags.rho.value_or(scenario.rho.value_or(th.rho));

  const auto& requests = flags.metrics.empty() ? scenario.metrics : flags.metrics;
  if (requests.empty()) return report;

  std::unique_ptr<Runner> runner;
  std::optional<ReportError> setup_error;
  try {
    runner = make_runner(scenario, th);
  } catch (const std::exception& e) {
    setup_error = error_of(e);
  }

  const MetricOptions opts{report.epsilon};
  for (const auto& request : requests) {
    MetricResult result;
    result.metric = request.name;
    if (setup_error) {
      result.error = setup_error;
    } else {
      try {
        validate_metric(scenario.kind, request);
        result.verdict = runner->run(request, opts);
      } catch (const std::exception& e) {
        result.error = error_of(e);
      }
    }
    report.results.push_back(std::move(result));
  }
  return report;
}

}  // namespace cufair
