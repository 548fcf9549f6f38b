#include "bsim/report.hpp"

#include <cstdio>
#include <fstream>

#include "bsim/errors.hpp"

namespace bsim {

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_coefficients_csv(const std::string& path, const Summary& summary) {
  auto out = open_csv(path);
  out << "parameter,covariate,mean,cri_lower,cri_upper\n";
  const auto rows = [&](const char* block, const std::vector<CoefficientSummary>& cs) {
    for (const auto& c : cs) {
      out << block << ',' << quote(c.name) << ',' << format_number(c.mean) << ','
          << format_number(c.cri.lower) << ',' << format_number(c.cri.upper)
          << '\n';
    }
  };
  rows("beta", summary.beta);
  rows("m", summary.m);
}

std::string subject_score_header(bool with_extrapolated) {
  std::string h =
      "subject_id,index_value,delta_mean,delta_lower,delta_upper,tbi,decision,"
      "decision_mean_rule,n_draws,n_delta_negative,n_exp_delta_below_one,"
      "pred_mean_arm0,pred_mean_arm1";
  if (with_extrapolated) h += ",extrapolated";
  return h;
}

void write_subject_scores_csv(const std::string& path,
                              const std::vector<SubjectScore>& scores,
                              bool with_extrapolated) {
  auto out = open_csv(path);
  out << subject_score_header(with_extrapolated) << '\n';
  for (const auto& s : scores) {
    out << quote(s.subject_id) << ',' << format_number(s.index_value) << ','
        << format_number(s.delta_mean) << ',' << format_number(s.cri_delta.lower)
        << ',' << format_number(s.cri_delta.upper) << ','
        << format_number(s.tbi) << ',' << s.decision << ','
        << s.decision_mean_rule << ',' << s.delta_draws.size() << ','
        << s.n_delta_negative << ',' << s.n_exp_delta_below_one << ','
        << format_number(s.pred_mean_arm0) << ','
        << format_number(s.pred_mean_arm1);
    if (with_extrapolated) out << ',' << (s.extrapolated ? "true" : "false");
    out << '\n';
  }
}

void write_figure_left_csv(const std::string& path, const Summary& summary) {
  auto out = open_csv(path);
  out << "u,exp_delta_mean,exp_delta_lower,exp_delta_upper\n";
  for (const auto& p : summary.curve) {
    out << format_number(p.u) << ',' << format_number(p.exp_delta_mean) << ','
        << format_number(p.cri.lower) << ',' << format_number(p.cri.upper) << '\n';
  }
}

void write_figure_right_csv(const std::string& path, const Summary& summary) {
  auto out = open_csv(path);
  out << "subject_id,tbi,exp_delta_mean,exp_delta_lower,exp_delta_upper,decision\n";
  for (const auto& s : summary.subjects) {
    out << quote(s.subject_id) << ',' << format_number(s.tbi) << ','
        << format_number(s.exp_delta_mean) << ','
        << format_number(s.cri_exp_delta.lower) << ','
        << format_number(s.cri_exp_delta.upper) << ',' << s.decision << '\n';
  }
}

}  // namespace bsim
