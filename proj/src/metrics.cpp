#include "warden/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "warden/text.hpp"

namespace warden::metrics {

namespace {

struct Cell {
  std::int64_t dist = 0;
  std::int64_t sub = 0;
  std::int64_t ins = 0;
  std::int64_t del = 0;
};

std::vector<std::string> scoring_tokens(std::string_view s) {
  return text::split_tokens(text::normalize_for_scoring(s));
}

std::vector<char32_t> scoring_chars(std::string_view s) {
  const std::string norm = text::normalize_for_scoring(s);
  std::string no_spaces;
  no_spaces.reserve(norm.size());
  for (char c : norm) {
    if (c != ' ') no_spaces.push_back(c);
  }
  return text::to_codepoints(no_spaces);
}

}  // namespace

template <typename T>
EditCounts levenshtein(const std::vector<T>& reference, const std::vector<T>& hypothesis) {
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();

  // one DP row; cells carry the S/I/D split alongside the distance
  std::vector<Cell> prev(m + 1);
  std::vector<Cell> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    prev[j].dist = static_cast<std::int64_t>(j);
    prev[j].ins = static_cast<std::int64_t>(j);
  }
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0].dist = static_cast<std::int64_t>(i);
    cur[0].sub = 0;
    cur[0].ins = 0;
    cur[0].del = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const bool match = reference[i - 1] == hypothesis[j - 1];
      const std::int64_t diag = prev[j - 1].dist + (match ? 0 : 1);
      const std::int64_t del = prev[j].dist + 1;
      const std::int64_t ins = cur[j - 1].dist + 1;

      if (diag <= del && diag <= ins) {
        cur[j] = prev[j - 1];
        cur[j].dist = diag;
        if (!match) cur[j].sub += 1;
      } else if (del <= ins) {
        cur[j] = prev[j];
        cur[j].dist = del;
        cur[j].del += 1;
      } else {
        cur[j] = cur[j - 1];
        cur[j].dist = ins;
        cur[j].ins += 1;
      }
    }
    std::swap(prev, cur);
  }

  EditCounts out;
  out.distance = prev[m].dist;
  out.substitutions = prev[m].sub;
  out.insertions = prev[m].ins;
  out.deletions = prev[m].del;
  out.reference_length = static_cast<std::int64_t>(n);
  return out;
}

template EditCounts levenshtein<std::string>(const std::vector<std::string>&,
                                             const std::vector<std::string>&);
template EditCounts levenshtein<char32_t>(const std::vector<char32_t>&, const std::vector<char32_t>&);
template EditCounts levenshtein<char>(const std::vector<char>&, const std::vector<char>&);
template EditCounts levenshtein<int>(const std::vector<int>&, const std::vector<int>&);

EditCounts wer_counts(std::string_view reference, std::string_view hypothesis) {
  const auto ref = scoring_tokens(reference);
  if (ref.empty()) {
    throw EmptyReference("wer: reference has no tokens after normalization");
  }
  return levenshtein(ref, scoring_tokens(hypothesis));
}

double wer(std::string_view reference, std::string_view hypothesis) {
  const EditCounts c = wer_counts(reference, hypothesis);
  return static_cast<double>(c.distance) / static_cast<double>(c.reference_length);
}

EditCounts cer_eval_counts(std::string_view reference, std::string_view hypothesis) {
  const auto ref = scoring_chars(reference);
  if (ref.empty()) {
    throw EmptyReference("cer: reference has no characters after normalization");
  }
  return levenshtein(ref, scoring_chars(hypothesis));
}

double cer_eval(std::string_view reference, std::string_view hypothesis) {
  const EditCounts c = cer_eval_counts(reference, hypothesis);
  return static_cast<double>(c.distance) / static_cast<double>(c.reference_length);
}

BleuDetail bleu4_detail(const std::vector<std::string>& references,
                        const std::vector<std::string>& hypotheses) {
  if (references.size() != hypotheses.size()) {
    throw LengthMismatch("bleu4: reference/hypothesis list sizes differ");
  }
  if (references.empty()) {
    throw EmptyCorpus("bleu4: empty corpus");
  }

  std::array<std::int64_t, 4> matched{};
  std::array<std::int64_t, 4> total{};
  std::int64_t hyp_tokens = 0;
  std::int64_t ref_tokens = 0;

  for (std::size_t s = 0; s < references.size(); ++s) {
    const auto ref = scoring_tokens(references[s]);
    const auto hyp = scoring_tokens(hypotheses[s]);
    ref_tokens += static_cast<std::int64_t>(ref.size());
    hyp_tokens += static_cast<std::int64_t>(hyp.size());

    for (std::size_t n = 1; n <= 4; ++n) {
      if (hyp.size() < n) continue;
      std::map<std::vector<std::string>, std::int64_t> ref_ngrams;
      if (ref.size() >= n) {
        for (std::size_t i = 0; i + n <= ref.size(); ++i) {
          ref_ngrams[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)] += 1;
        }
      }
      std::map<std::vector<std::string>, std::int64_t> hyp_ngrams;
      for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
        hyp_ngrams[std::vector<std::string>(hyp.begin() + i, hyp.begin() + i + n)] += 1;
      }
      for (const auto& [gram, count] : hyp_ngrams) {
        const auto it = ref_ngrams.find(gram);
        const std::int64_t clip = it == ref_ngrams.end() ? 0 : it->second;
        matched[n - 1] += std::min(count, clip);
      }
      total[n - 1] += static_cast<std::int64_t>(hyp.size() - n + 1);
    }
  }

  BleuDetail detail;
  detail.hypothesis_tokens = hyp_tokens;
  detail.reference_tokens = ref_tokens;
  if (hyp_tokens == 0) {
    return detail;  // nothing was produced; score is 0
  }

  const double floor = 1.0 / (2.0 * static_cast<double>(hyp_tokens));
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    double p;
    if (matched[n] > 0) {
      p = static_cast<double>(matched[n]) / static_cast<double>(total[n]);
    } else {
      p = floor;
    }
    detail.precisions[n] = p;
    log_sum += std::log(p);
  }

  detail.brevity_penalty =
      hyp_tokens < ref_tokens
          ? std::exp(1.0 - static_cast<double>(ref_tokens) / static_cast<double>(hyp_tokens))
          : 1.0;
  detail.bleu = detail.brevity_penalty * std::exp(log_sum / 4.0);
  return detail;
}

double bleu4(const std::vector<std::string>& references, const std::vector<std::string>& hypotheses) {
  return bleu4_detail(references, hypotheses).bleu;
}

EvalReport corpus_report(const std::vector<std::string>& references,
                         const std::vector<std::string>& hypotheses) {
  if (references.size() != hypotheses.size()) {
    throw LengthMismatch("corpus_report: reference/hypothesis list sizes differ");
  }
  if (references.empty()) {
    throw EmptyCorpus("corpus_report: empty corpus");
  }

  EvalReport report;
  report.sample_count = references.size();
  for (std::size_t i = 0; i < references.size(); ++i) {
    const EditCounts w = wer_counts(references[i], hypotheses[i]);
    report.wer_counts.distance += w.distance;
    report.wer_counts.substitutions += w.substitutions;
    report.wer_counts.insertions += w.insertions;
    report.wer_counts.deletions += w.deletions;
    report.wer_counts.reference_length += w.reference_length;

    const EditCounts c = cer_eval_counts(references[i], hypotheses[i]);
    report.cer_counts.distance += c.distance;
    report.cer_counts.substitutions += c.substitutions;
    report.cer_counts.insertions += c.insertions;
    report.cer_counts.deletions += c.deletions;
    report.cer_counts.reference_length += c.reference_length;
  }
  report.wer = static_cast<double>(report.wer_counts.distance) /
               static_cast<double>(report.wer_counts.reference_length);
  report.cer = static_cast<double>(report.cer_counts.distance) /
               static_cast<double>(report.cer_counts.reference_length);
  report.bleu4 = bleu4(references, hypotheses);
  return report;
}

std::string render_report(const EvalReport& report) {
  std::ostringstream os;
  os << "metric   value    S        I        D        ref_len\n";
  auto line = [&os](const char* name, double value, const EditCounts& c) {
    os << name;
    for (std::size_t i = std::string(name).size(); i < 9; ++i) os << ' ';
    std::string v = text::format_fixed(value, 4);
    os << v;
    for (std::size_t i = v.size(); i < 9; ++i) os << ' ';
    for (const std::int64_t x : {c.substitutions, c.insertions, c.deletions, c.reference_length}) {
      std::string s = std::to_string(x);
      os << s;
      for (std::size_t i = s.size(); i < 9; ++i) os << ' ';
    }
    os << '\n';
  };
  line("wer", report.wer, report.wer_counts);
  line("cer", report.cer, report.cer_counts);
  os << "bleu4    " << text::format_fixed(report.bleu4, 4) << '\n';
  if (report.partial) {
    os << "partial  " << report.failed_ids.size() << " sample(s) failed\n";
  }
  return os.str();
}

}  // namespace warden::metrics
