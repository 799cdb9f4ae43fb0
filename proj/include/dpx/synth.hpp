#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dpx/corpus.hpp"
#include "dpx/eval.hpp"

namespace dpx {

struct SynthOptions {
    uint64_t seed = 1;
    int n_docs = 20;          // synthetic docs; the three named fixtures are added on top
    double distractor_rate = 1.0;  // chance a truth value gets Min/Max flanks
    int n_queries = 0;        // 0 -> 2 * (n_docs + 3)
};

struct SynthCorpus {
    std::vector<std::pair<std::string, std::string>> files;  // filename -> contents
    GroundTruth truth;
    std::vector<EvalQuery> queries;

    CorpusIndex build_index() const;
};

// Deterministic synthetic datasheets across five device families, with the
// distractor structures the evaluation exercises: Min/Typ/Max flanks around
// typical values, absolute-maximum-ratings rows that repeat characteristic
// symbols with rating values, over-temperature summary tables repeating
// parameter names with wider spans, condition-qualified rows whose matching
// row sits at the end of the table, and alias part numbers. Also emits the
// three named fixtures p2n2222a.dst, 2n7002e.dst, 5100h5.dst with fixed
// contents.
SynthCorpus gen_synthetic_corpus(const SynthOptions& options);

// Persist / reload a generated corpus: one .dst per document plus
// _truth.json and _queries.json.
void write_corpus(const SynthCorpus& corpus, const std::string& directory);
SynthCorpus load_corpus(const std::string& directory);

std::string truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const std::string& json_text);
std::string queries_to_json(const std::vector<EvalQuery>& queries);
std::vector<EvalQuery> queries_from_json(const std::string& json_text);

}  // namespace dpx
