#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace semscore {

using TokenSequence = std::vector<std::string>;

// Lowercase, treat every non-alphanumeric character as a separator, keep
// digits. This is the tokenization of the reference ROUGE-L scorer and is
// pinned by the published golden scores (0.143 / 0.222 / 0.25 / 0.667).
TokenSequence rouge_tokenize(std::string_view text);

int lcs_length(const TokenSequence& a, const TokenSequence& b);

// LCS F-measure: 2PR/(P+R) with P = LCS/|candidate|, R = LCS/|target|.
// 0 when either side has no tokens or nothing is shared.
double rouge_l(std::string_view target, std::string_view candidate);

// mteval-13a tokenization: case preserved, punctuation padded into
// standalone tokens, periods/commas kept inside numbers ("3.5").
TokenSequence tokenize_13a(std::string_view text);

// Sentence BLEU, 0..100: modified n-gram precisions up to order 4 over 13a
// tokens, exponential smoothing for zero-match orders, brevity penalty
// min(1, exp(1 - ref_len/hyp_len)). Orders the candidate is too short to
// form are dropped from the geometric mean. 0 if the candidate is empty.
double sentence_bleu(std::string_view target, std::string_view candidate);

// Pooled corpus BLEU: n-gram counts summed over all pairs before the
// geometric mean. Not used in default reports.
double corpus_bleu(const std::vector<std::string>& targets,
                   const std::vector<std::string>& candidates);

// Arithmetic mean; throws on empty input.
double mean_metric(const std::vector<double>& scores);

}  // namespace semscore
