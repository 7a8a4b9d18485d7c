#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sonoforge/image.hpp"

namespace sonoforge {

/// Classifier output scores, patterns x classes.
struct ScoreMatrix {
  std::vector<std::string> pattern_ids;
  std::vector<std::string> class_names;
  std::vector<double> scores;  // row-major
  std::string source_tag;

  double& at(std::size_t p, std::size_t c) {
    return scores[p * class_names.size() + c];
  }
  double at(std::size_t p, std::size_t c) const {
    return scores[p * class_names.size() + c];
  }
};

struct FoldSplit {
  int fold_id = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

struct EvalReport {
  std::vector<int> fold_ids;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  std::vector<std::string> class_names;
  std::vector<double> per_class_accuracy;
  std::vector<long> confusion;  // truth x predicted, row-major
};

/// NaN and +-Inf entries become 0; everything else is untouched.
ScoreMatrix sanitize(ScoreMatrix m);

/// (v - mean)/std over all entries (population std). Errors on fewer
/// than two entries or a constant matrix.
ScoreMatrix normalize(ScoreMatrix m);

/// Entrywise arithmetic mean; members must agree on pattern and class
/// order. Exactly permutation-invariant over members.
ScoreMatrix sum_rule(const std::vector<ScoreMatrix>& members);

/// Per-pattern argmax class index; ties break to the lowest index.
std::vector<int> predict(const ScoreMatrix& m);

/// Fold accuracies on each split's test ids plus mean, per-class
/// accuracy and a confusion matrix over all test predictions.
EvalReport evaluate(const std::vector<FoldSplit>& splits, const ScoreMatrix& m,
                    const std::map<std::string, std::string>& truth);

struct LabeledScores {
  ScoreMatrix scores;
  std::vector<std::string> true_labels;  // aligned with pattern_ids
};

/// CSV with header "pattern_id,true_label,score_<class>,..."; "NaN"
/// tokens are permitted and sanitized to 0 on load.
LabeledScores load_scores_csv(const std::filesystem::path& path);
void save_scores_csv(const ScoreMatrix& m,
                     const std::vector<std::string>& true_labels,
                     const std::filesystem::path& path);

void save_report_csv(const EvalReport& r, const std::filesystem::path& path);
std::string format_report(const EvalReport& r);

/// Nearest-centroid baseline over downscaled images; a desk-scale
/// stand-in classifier for exercising the fusion harness.
struct PrototypeModel {
  int side = 32;
  std::vector<std::string> class_names;  // sorted
  std::vector<double> centroids;         // class x side*side, pixels in [0,1]
};

PrototypeModel prototype_train(const std::vector<GrayImage>& images,
                               const std::vector<std::string>& labels, int side);

/// score_c = -(L2 distance to centroid c); higher is better.
std::vector<double> prototype_score(const GrayImage& image,
                                    const PrototypeModel& model);

}  // namespace sonoforge
