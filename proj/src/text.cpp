// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/text.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace tvrec {

namespace {

constexpr const char* kDefaultStopwords[] = {
    "a",    "an",   "and",  "are",  "as",   "at",   "be",   "but",  "by",   "for",
    "from", "had",  "has",  "have", "he",   "her",  "his",  "i",    "if",   "in",
    "is",   "it",   "its",  "my",   "no",   "not",  "of",   "on",   "or",   "our",
    "she",  "so",   "that", "the",  "their", "them", "then", "there", "they", "this",
    "to",   "up",   "was",  "we",   "were", "what", "when", "will", "with", "you",
};

}  // namespace

const StopwordSet& default_stopwords() {
    static const StopwordSet set = [] {
        StopwordSet s;
        for (const char* w : kDefaultStopwords) s.words.insert(w);
        return s;
    }();
    return set;
}

StopwordSet load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword list: " + path);
    StopwordSet s;
    std::string word;
    while (in >> word) s.words.insert(word);
    return s;
}

std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            if (!stopwords.contains(cur)) tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty() && !stopwords.contains(cur)) tokens.push_back(cur);
    return tokens;
}

}  // namespace tvrec
