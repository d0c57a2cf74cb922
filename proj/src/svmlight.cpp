// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/svmlight.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tvrec {

void write_svmlight(const std::string& path, const RankingDataset& dataset) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);
    char buf[64];
    for (size_t q = 0; q < dataset.num_queries(); ++q) {
        for (size_t d = dataset.query_offsets[q]; d < dataset.query_offsets[q + 1]; ++d) {
            out << dataset.labels[d] << " qid:" << (q + 1);
            std::span<const double> row = dataset.doc(d);
            for (size_t f = 0; f < row.size(); ++f) {
                if (row[f] == 0.0) continue;
                std::snprintf(buf, sizeof(buf), " %zu:%.17g", f + 1, row[f]);
                out << buf;
            }
            out << "\n";
        }
    }
}

RankingDataset read_svmlight(const std::string& path, size_t num_features) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read dataset: " + path);
    RankingDataset dataset;
    dataset.num_features = num_features;
    std::string line;
    long current_qid = -1;
    std::uint64_t doc_counter = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int label;
        std::string qid_tok;
        if (!(ls >> label >> qid_tok) || qid_tok.rfind("qid:", 0) != 0) {
            throw std::runtime_error("malformed svmlight row: " + line);
        }
        long qid = std::stol(qid_tok.substr(4));
        if (qid != current_qid) {
            if (current_qid >= 0) dataset.end_query(1);
            dataset.begin_query(static_cast<std::uint64_t>(qid));
            current_qid = qid;
        }
        std::vector<double> row(num_features, 0.0);
        std::string pair;
        while (ls >> pair) {
            size_t colon = pair.find(':');
            if (colon == std::string::npos) throw std::runtime_error("malformed feature: " + pair);
            size_t idx = std::stoul(pair.substr(0, colon));
            if (idx < 1 || idx > num_features) throw std::runtime_error("feature index out of range");
            row[idx - 1] = std::stod(pair.substr(colon + 1));
        }
        dataset.add_doc(row, label, doc_counter++);
    }
    if (current_qid >= 0) dataset.end_query(1);
    return dataset;
}

void write_schema_json(const std::string& path, const FeatureSchema& schema) {
    nlohmann::json j;
    j["features"] = schema.names;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write schema: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace tvrec
