// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tvrec {

struct StopwordSet {
    std::set<std::string> words;
    bool contains(const std::string& w) const { return words.count(w) > 0; }
};

/// The built-in 50-word English function-word list. data/stopwords.txt ships
/// the same list; load_stopwords() reads a replacement from disk.
const StopwordSet& default_stopwords();

StopwordSet load_stopwords(const std::string& path);

/// Lowercase, split on non-alphanumeric, drop stopwords.
std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords);

}  // namespace tvrec
