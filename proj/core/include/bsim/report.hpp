#ifndef BSIM_REPORT_HPP
#define BSIM_REPORT_HPP

#include <string>
#include <vector>

#include "bsim/inference.hpp"

namespace bsim {

// %.17g: round-trips every double, so equal files mean equal values.
std::string format_number(double value);

// parameter,covariate,mean,cri_lower,cri_upper  (beta rows, then m rows)
void write_coefficients_csv(const std::string& path, const Summary& summary);

// One row per subject; see subject_score_header().
void write_subject_scores_csv(const std::string& path,
                              const std::vector<SubjectScore>& scores,
                              bool with_extrapolated = false);
std::string subject_score_header(bool with_extrapolated = false);

// u,exp_delta_mean,exp_delta_lower,exp_delta_upper
void write_figure_left_csv(const std::string& path, const Summary& summary);

// subject_id,tbi,exp_delta_mean,exp_delta_lower,exp_delta_upper,decision
void write_figure_right_csv(const std::string& path, const Summary& summary);

}  // namespace bsim

#endif  // BSIM_REPORT_HPP
