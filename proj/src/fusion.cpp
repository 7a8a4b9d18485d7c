#include "sonoforge/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace sonoforge {

ScoreMatrix sanitize(ScoreMatrix m) {
  for (double& v : m.scores)
    if (!std::isfinite(v)) v = 0.0;
  return m;
}

ScoreMatrix normalize(ScoreMatrix m) {
  require(m.scores.size() >= 2, ErrorCode::InvalidArgument,
          "normalize: need at least two entries");
  double mean = 0.0;
  for (double v : m.scores) mean += v;
  mean /= m.scores.size();
  double var = 0.0;
  for (double v : m.scores) var += (v - mean) * (v - mean);
  var /= m.scores.size();  // population variance
  require(var > 0.0, ErrorCode::ConstantMatrix,
          "normalize: constant matrix has no scale");
  const double inv_std = 1.0 / std::sqrt(var);
  for (double& v : m.scores) v = (v - mean) * inv_std;
  return m;
}

ScoreMatrix sum_rule(const std::vector<ScoreMatrix>& members) {
  require(!members.empty(), ErrorCode::InvalidArgument, "sum_rule: empty list");
  const ScoreMatrix& first = members.front();
  for (const ScoreMatrix& m : members) {
    require(m.pattern_ids == first.pattern_ids, ErrorCode::ShapeMismatch,
            "sum_rule: pattern ids differ between members");
    require(m.class_names == first.class_names, ErrorCode::ShapeMismatch,
            "sum_rule: class names differ between members");
  }
  ScoreMatrix out = first;
  out.source_tag = "sum_rule";
  const std::size_t k = members.size();
  std::vector<double> cell(k);
  for (std::size_t i = 0; i < out.scores.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) cell[j] = members[j].scores[i];
    // Summing in sorted order makes the mean independent of member order.
    std::sort(cell.begin(), cell.end());
    double acc = 0.0;
    for (double v : cell) acc += v;
    out.scores[i] = acc / double(k);
  }
  return out;
}

std::vector<int> predict(const ScoreMatrix& m) {
  const std::size_t n_classes = m.class_names.size();
  require(n_classes >= 1, ErrorCode::InvalidArgument, "predict: no classes");
  std::vector<int> labels(m.pattern_ids.size());
  for (std::size_t p = 0; p < m.pattern_ids.size(); ++p) {
    int best = 0;
    for (std::size_t c = 1; c < n_classes; ++c)
      if (m.at(p, c) > m.at(p, best)) best = int(c);
    labels[p] = best;
  }
  return labels;
}

EvalReport evaluate(const std::vector<FoldSplit>& splits, const ScoreMatrix& m,
                    const std::map<std::string, std::string>& truth) {
  require(!splits.empty(), ErrorCode::InvalidArgument, "evaluate: no folds");
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < m.pattern_ids.size(); ++i)
    row_of[m.pattern_ids[i]] = i;
  std::unordered_map<std::string, int> class_of;
  for (std::size_t c = 0; c < m.class_names.size(); ++c)
    class_of[m.class_names[c]] = int(c);

  const auto preds = predict(m);
  const int k = int(m.class_names.size());

  EvalReport r;
  r.class_names = m.class_names;
  r.confusion.assign(std::size_t(k) * k, 0);
  std::vector<long> class_total(k, 0), class_correct(k, 0);

  for (const FoldSplit& split : splits) {
    long correct = 0;
    require(!split.test_ids.empty(), ErrorCode::InvalidArgument,
            "evaluate: fold with no test patterns");
    for (const std::string& id : split.test_ids) {
      const auto row_it = row_of.find(id);
      require(row_it != row_of.end(), ErrorCode::MissingPattern,
              "evaluate: pattern missing from scores: " + id);
      const auto truth_it = truth.find(id);
      require(truth_it != truth.end(), ErrorCode::MissingPattern,
              "evaluate: pattern missing from truth: " + id);
      const auto class_it = class_of.find(truth_it->second);
      require(class_it != class_of.end(), ErrorCode::MissingPattern,
              "evaluate: unknown true label: " + truth_it->second);
      const int t = class_it->second;
      const int y = preds[row_it->second];
      r.confusion[std::size_t(t) * k + y] += 1;
      class_total[t] += 1;
      if (t == y) {
        correct += 1;
        class_correct[t] += 1;
      }
    }
    r.fold_ids.push_back(split.fold_id);
    r.fold_accuracy.push_back(double(correct) / double(split.test_ids.size()));
  }

  double acc = 0.0;
  for (double a : r.fold_accuracy) acc += a;
  r.mean_accuracy = acc / double(r.fold_accuracy.size());
  r.per_class_accuracy.resize(k);
  for (int c = 0; c < k; ++c)
    r.per_class_accuracy[c] =
        class_total[c] > 0 ? double(class_correct[c]) / class_total[c] : 0.0;
  return r;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

LabeledScores load_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::FileNotFound,
          "scores: cannot open " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError,
          "scores: empty file " + path.string());
  auto header = split_csv_line(line);
  require(header.size() >= 3 && strip(header[0]) == "pattern_id" &&
              strip(header[1]) == "true_label",
          ErrorCode::ParseError,
          "scores: expected header pattern_id,true_label,score_<class>,...");

  LabeledScores out;
  out.scores.source_tag = path.filename().string();
  for (std::size_t i = 2; i < header.size(); ++i) {
    const std::string col = strip(header[i]);
    require(col.rfind("score_", 0) == 0, ErrorCode::ParseError,
            "scores: bad score column name: " + col);
    out.scores.class_names.push_back(col.substr(6));
  }

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_csv_line(line);
    require(fields.size() == header.size(), ErrorCode::ParseError,
            "scores: wrong field count at line " + std::to_string(line_no));
    out.scores.pattern_ids.push_back(strip(fields[0]));
    out.true_labels.push_back(strip(fields[1]));
    for (std::size_t i = 2; i < fields.size(); ++i) {
      const std::string tok = strip(fields[i]);
      double v;
      try {
        v = std::stod(tok);
      } catch (const std::exception&) {
        raise(ErrorCode::ParseError,
              "scores: bad number '" + tok + "' at line " + std::to_string(line_no));
      }
      out.scores.scores.push_back(v);
    }
  }
  out.scores = sanitize(std::move(out.scores));
  return out;
}

void save_scores_csv(const ScoreMatrix& m,
                     const std::vector<std::string>& true_labels,
                     const std::filesystem::path& path) {
  require(true_labels.size() == m.pattern_ids.size(), ErrorCode::ShapeMismatch,
          "scores: labels/patterns size mismatch");
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "scores: cannot write " + path.string());
  out << "pattern_id,true_label";
  for (const auto& c : m.class_names) out << ",score_" << c;
  out << "\n";
  out.precision(17);
  for (std::size_t p = 0; p < m.pattern_ids.size(); ++p) {
    out << m.pattern_ids[p] << "," << true_labels[p];
    for (std::size_t c = 0; c < m.class_names.size(); ++c) out << "," << m.at(p, c);
    out << "\n";
  }
}

void save_report_csv(const EvalReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "report: cannot write " + path.string());
  out.precision(17);
  out << "metric,key,value\n";
  for (std::size_t i = 0; i < r.fold_accuracy.size(); ++i)
    out << "fold_accuracy," << r.fold_ids[i] << "," << r.fold_accuracy[i] << "\n";
  out << "mean_accuracy,," << r.mean_accuracy << "\n";
  for (std::size_t c = 0; c < r.class_names.size(); ++c)
    out << "class_accuracy," << r.class_names[c] << "," << r.per_class_accuracy[c]
        << "\n";
  const std::size_t k = r.class_names.size();
  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t y = 0; y < k; ++y)
      out << "confusion," << r.class_names[t] << ">" << r.class_names[y] << ","
          << r.confusion[t * k + y] << "\n";
}

std::string format_report(const EvalReport& r) {
  std::ostringstream os;
  os.precision(4);
  os << "folds: " << r.fold_accuracy.size() << "\n";
  for (std::size_t i = 0; i < r.fold_accuracy.size(); ++i)
    os << "  fold " << r.fold_ids[i] << ": accuracy " << r.fold_accuracy[i] << "\n";
  os << "mean accuracy: " << r.mean_accuracy << "\n";
  os << "per-class accuracy:\n";
  for (std::size_t c = 0; c < r.class_names.size(); ++c)
    os << "  " << r.class_names[c] << ": " << r.per_class_accuracy[c] << "\n";
  return os.str();
}

PrototypeModel prototype_train(const std::vector<GrayImage>& images,
                               const std::vector<std::string>& labels, int side) {
  require(images.size() == labels.size() && !images.empty(),
          ErrorCode::InvalidArgument, "prototype_train: empty or mismatched input");
  require(side >= 1, ErrorCode::InvalidArgument, "prototype_train: side < 1");

  PrototypeModel model;
  model.side = side;
  for (const auto& l : labels)
    if (std::find(model.class_names.begin(), model.class_names.end(), l) ==
        model.class_names.end())
      model.class_names.push_back(l);
  std::sort(model.class_names.begin(), model.class_names.end());

  const std::size_t dim = std::size_t(side) * side;
  model.centroids.assign(model.class_names.size() * dim, 0.0);
  std::vector<long> counts(model.class_names.size(), 0);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto small = resize_bilinear(images[i], side, side);
    const auto cls = std::lower_bound(model.class_names.begin(),
                                      model.class_names.end(), labels[i]) -
                     model.class_names.begin();
    double* cen = &model.centroids[std::size_t(cls) * dim];
    for (std::size_t j = 0; j < dim; ++j) cen[j] += small.pixels[j] / 255.0;
    counts[cls] += 1;
  }
  for (std::size_t c = 0; c < model.class_names.size(); ++c) {
    require(counts[c] > 0, ErrorCode::InvalidArgument,
            "prototype_train: class without images: " + model.class_names[c]);
    for (std::size_t j = 0; j < dim; ++j)
      model.centroids[c * dim + j] /= double(counts[c]);
  }
  return model;
}

std::vector<double> prototype_score(const GrayImage& image,
                                    const PrototypeModel& model) {
  require(!model.class_names.empty(), ErrorCode::InvalidArgument,
          "prototype_score: untrained model");
  const auto small = resize_bilinear(image, model.side, model.side);
  const std::size_t dim = std::size_t(model.side) * model.side;
  std::vector<double> scores(model.class_names.size());
  for (std::size_t c = 0; c < model.class_names.size(); ++c) {
    const double* cen = &model.centroids[c * dim];
    double d2 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = small.pixels[j] / 255.0 - cen[j];
      d2 += diff * diff;
    }
    scores[c] = -std::sqrt(d2);
  }
  return scores;
}

}  // namespace sonoforge
