#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace olidtk {

inline constexpr std::string_view kUserTag = "<user>";
inline constexpr std::string_view kAllcapsTag = "<allcaps>";

using TokenSeq = std::vector<std::string>;

// Emoji -> replacement phrase. Phrases are lowercase letters and spaces.
// Matching is longest-emoji-first so multi-codepoint sequences win over
// their prefixes. Emojis not in the map fall through to special-character
// removal and disappear.
class EmojiMap {
 public:
  EmojiMap() = default;

  static EmojiMap load(const std::string& path);
  static EmojiMap parse(std::istream& in, const std::string& source_name);
  // The default dictionary of ~50 common emojis shipped with the toolkit
  // (same content as data/emoji_map.tsv).
  static const EmojiMap& builtin();

  void add(std::string emoji, std::string phrase);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;  // longest emoji first
};

// Camel-case hashtag body splitter: boundaries at lower->upper, at the last
// capital of an acronym run followed by lowercase, and between letters and
// digits. Underscores act as separators and are dropped.
//   "ILoveYou" -> {"I", "Love", "You"},  "trump2020" -> {"trump", "2020"}
std::vector<std::string> split_hashtag(std::string_view body);

// Applies the cleanup rules in order: @-mentions -> <user>; hashtag
// stripping and splitting; emoji replacement; all-caps detection (>= 3
// alphabetic characters, all uppercase -> append <allcaps>); removal of
// special characters other than . , ? !; removal of standalone numbers;
// whitespace collapsing; lowercasing; collapsing of consecutive duplicate
// tokens. Idempotent: sentinel tags present in the input are preserved.
std::string normalize(std::string_view text, const EmojiMap& emojis);

// Whitespace split after padding . , ? ! with spaces. Input is expected to
// be normalize() output.
TokenSeq tokenize(std::string_view normalized);

// Order-preserving stopword filter; used by the EDA path only, never for
// model features.
TokenSeq remove_stopwords(const TokenSeq& tokens, const std::set<std::string>& stoplist);

// tokenize(normalize(text, emojis)).
TokenSeq preprocess_pipeline(std::string_view text, const EmojiMap& emojis);

// Vendored English stoplist (~150 words; same content as data/stopwords_en.txt).
const std::set<std::string>& builtin_stopwords();
std::set<std::string> load_stopwords(const std::string& path);

}  // namespace olidtk
