#include "olidtk/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "olidtk/errors.hpp"

namespace olidtk {

namespace {

bool is_word_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
}
bool is_alpha(char ch) { return std::isalpha(static_cast<unsigned char>(ch)) != 0; }
bool is_digit(char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; }
bool is_upper(char ch) { return std::isupper(static_cast<unsigned char>(ch)) != 0; }
bool is_lower(char ch) { return std::islower(static_cast<unsigned char>(ch)) != 0; }
bool is_space(char ch) { return std::isspace(static_cast<unsigned char>(ch)) != 0; }

// Working representation during normalization. Raw text goes through every
// rule; Sub(stituted) text came from the emoji dictionary and is excluded
// from all-caps detection; Tag segments are the sentinels and pass through
// untouched.
struct Seg {
  enum Kind { Raw, Sub, Tag } kind;
  std::string text;
};

// Protect sentinel tags already present in the input so normalize stays
// idempotent (a second pass must not strip their angle brackets).
std::vector<Seg> parse_sentinels(std::string_view text) {
  std::vector<Seg> segs;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t user = text.find(kUserTag, pos);
    size_t caps = text.find(kAllcapsTag, pos);
    size_t hit = std::min(user, caps);
    if (hit == std::string_view::npos) {
      segs.push_back({Seg::Raw, std::string(text.substr(pos))});
      break;
    }
    if (hit > pos) segs.push_back({Seg::Raw, std::string(text.substr(pos, hit - pos))});
    std::string_view tag = (hit == user) ? kUserTag : kAllcapsTag;
    segs.push_back({Seg::Tag, std::string(tag)});
    pos = hit + tag.size();
  }
  return segs;
}

// @USER (the OLID anonymization token) and, as a fallback, any @word.
std::vector<Seg> replace_mentions(const std::vector<Seg>& segs) {
  std::vector<Seg> out;
  for (const Seg& seg : segs) {
    if (seg.kind != Seg::Raw) {
      out.push_back(seg);
      continue;
    }
    const std::string& s = seg.text;
    size_t pos = 0;
    std::string pending;
    while (pos < s.size()) {
      if (s[pos] == '@' && pos + 1 < s.size() && is_word_char(s[pos + 1])) {
        size_t end = pos + 1;
        while (end < s.size() && is_word_char(s[end])) ++end;
        if (!pending.empty()) out.push_back({Seg::Raw, std::move(pending)});
        pending.clear();
        out.push_back({Seg::Tag, std::string(kUserTag)});
        pos = end;
      } else {
        pending.push_back(s[pos]);
        ++pos;
      }
    }
    if (!pending.empty()) out.push_back({Seg::Raw, std::move(pending)});
  }
  return out;
}

void split_hashtags_inplace(std::vector<Seg>& segs) {
  for (Seg& seg : segs) {
    if (seg.kind != Seg::Raw) continue;
    if (seg.text.find('#') == std::string::npos) continue;
    std::string rebuilt;
    const std::string& s = seg.text;
    size_t pos = 0;
    while (pos < s.size()) {
      if (s[pos] == '#' && pos + 1 < s.size() && is_word_char(s[pos + 1])) {
        size_t end = pos + 1;
        while (end < s.size() && is_word_char(s[end])) ++end;
        std::vector<std::string> words = split_hashtag(s.substr(pos + 1, end - pos - 1));
        rebuilt.push_back(' ');
        for (size_t w = 0; w < words.size(); ++w) {
          if (w > 0) rebuilt.push_back(' ');
          rebuilt += words[w];
        }
        rebuilt.push_back(' ');
        pos = end;
      } else {
        // A bare '#' falls through to special-character removal.
        rebuilt.push_back(s[pos]);
        ++pos;
      }
    }
    seg.text = std::move(rebuilt);
  }
}

std::vector<Seg> replace_emojis(const std::vector<Seg>& segs, const EmojiMap& emojis) {
  if (emojis.empty()) return segs;
  std::vector<Seg> out;
  for (const Seg& seg : segs) {
    if (seg.kind != Seg::Raw) {
      out.push_back(seg);
      continue;
    }
    const std::string& s = seg.text;
    std::string pending;
    size_t pos = 0;
    while (pos < s.size()) {
      const std::pair<std::string, std::string>* hit = nullptr;
      for (const auto& entry : emojis.entries()) {
        if (s.compare(pos, entry.first.size(), entry.first) == 0) {
          hit = &entry;
          break;  // entries are longest-first
        }
      }
      if (hit != nullptr) {
        if (!pending.empty()) out.push_back({Seg::Raw, std::move(pending)});
        pending.clear();
        out.push_back({Seg::Sub, hit->second});
        pos += hit->first.size();
      } else {
        pending.push_back(s[pos]);
        ++pos;
      }
    }
    if (!pending.empty()) out.push_back({Seg::Raw, std::move(pending)});
  }
  return out;
}

bool kept_punct(char ch) { return ch == '.' || ch == ',' || ch == '?' || ch == '!'; }

void remove_special_chars(std::vector<Seg>& segs) {
  for (Seg& seg : segs) {
    if (seg.kind == Seg::Tag) continue;
    std::string kept;
    for (char ch : seg.text) {
      if (std::isalnum(static_cast<unsigned char>(ch)) || is_space(ch) || kept_punct(ch))
        kept.push_back(ch);
    }
    seg.text = std::move(kept);
  }
}

// Drops maximal digit runs that touch no letter on either side; digits glued
// to a word ("covid19", "1st") survive.
void remove_standalone_numbers(std::vector<Seg>& segs) {
  for (Seg& seg : segs) {
    if (seg.kind != Seg::Raw) continue;
    const std::string& s = seg.text;
    std::string kept;
    size_t pos = 0;
    while (pos < s.size()) {
      if (is_digit(s[pos])) {
        size_t end = pos;
        while (end < s.size() && is_digit(s[end])) ++end;
        bool letter_before = pos > 0 && is_alpha(s[pos - 1]);
        bool letter_after = end < s.size() && is_alpha(s[end]);
        if (letter_before || letter_after) kept += s.substr(pos, end - pos);
        pos = end;
      } else {
        kept.push_back(s[pos]);
        ++pos;
      }
    }
    seg.text = std::move(kept);
  }
}

std::string collapse_whitespace(const std::string& s) {
  std::string out;
  bool in_space = true;  // trims leading whitespace
  for (char ch : s) {
    if (is_space(ch)) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      out.push_back(ch);
      in_space = false;
    }
  }
  return out;
}

std::string collapse_duplicate_tokens(const std::string& s) {
  std::string out;
  std::string prev;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    if (tok == prev) continue;
    if (!out.empty()) out.push_back(' ');
    out += tok;
    prev = tok;
  }
  return out;
}

}  // namespace

std::vector<std::string> split_hashtag(std::string_view body) {
  std::vector<std::string> words;
  std::string current;
  for (size_t i = 0; i < body.size(); ++i) {
    char ch = body[i];
    if (ch == '_') {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (!current.empty()) {
      char prev = current.back();
      bool boundary =
          (is_lower(prev) && is_upper(ch)) ||
          (is_upper(prev) && is_upper(ch) && i + 1 < body.size() && is_lower(body[i + 1])) ||
          (is_alpha(prev) && is_digit(ch)) || (is_digit(prev) && is_alpha(ch));
      if (boundary) {
        words.push_back(std::move(current));
        current.clear();
      }
    }
    current.push_back(ch);
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::string normalize(std::string_view text, const EmojiMap& emojis) {
  std::vector<Seg> segs = parse_sentinels(text);
  segs = replace_mentions(segs);
  split_hashtags_inplace(segs);
  segs = replace_emojis(segs, emojis);

  // All-caps detection looks at the author's own characters only, not at
  // substituted phrases or sentinel tags.
  size_t alpha = 0, upper = 0;
  for (const Seg& seg : segs) {
    if (seg.kind != Seg::Raw) continue;
    for (char ch : seg.text) {
      if (is_alpha(ch)) {
        ++alpha;
        if (is_upper(ch)) ++upper;
      }
    }
  }
  if (alpha >= 3 && alpha == upper) segs.push_back({Seg::Tag, std::string(kAllcapsTag)});

  remove_special_chars(segs);
  remove_standalone_numbers(segs);

  for (Seg& seg : segs) {
    if (seg.kind != Seg::Raw) continue;
    std::transform(seg.text.begin(), seg.text.end(), seg.text.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  }

  std::string joined;
  for (const Seg& seg : segs) {
    if (seg.text.empty()) continue;
    if (!joined.empty()) joined.push_back(' ');
    joined += seg.text;
  }
  return collapse_duplicate_tokens(collapse_whitespace(joined));
}

TokenSeq tokenize(std::string_view normalized) {
  std::string spaced;
  spaced.reserve(normalized.size());
  for (char ch : normalized) {
    if (kept_punct(ch)) {
      spaced.push_back(' ');
      spaced.push_back(ch);
      spaced.push_back(' ');
    } else {
      spaced.push_back(ch);
    }
  }
  TokenSeq tokens;
  std::istringstream in(spaced);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

TokenSeq remove_stopwords(const TokenSeq& tokens, const std::set<std::string>& stoplist) {
  TokenSeq out;
  out.reserve(tokens.size());
  for (const std::string& tok : tokens)
    if (stoplist.find(tok) == stoplist.end()) out.push_back(tok);
  return out;
}

TokenSeq preprocess_pipeline(std::string_view text, const EmojiMap& emojis) {
  return tokenize(normalize(text, emojis));
}

void EmojiMap::add(std::string emoji, std::string phrase) {
  if (emoji.empty()) throw ConfigError("emoji map: empty emoji");
  for (char ch : phrase) {
    if (!is_lower(ch) && ch != ' ')
      throw ConfigError("emoji map: phrase must be lowercase letters and spaces: '" + phrase +
                        "'");
  }
  auto pos = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) {
    return e.first.size() < emoji.size();
  });
  entries_.insert(pos, {std::move(emoji), std::move(phrase)});
}

EmojiMap EmojiMap::parse(std::istream& in, const std::string& source_name) {
  EmojiMap map;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(source_name, line_no, "expected emoji<TAB>phrase");
    map.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return map;
}

EmojiMap EmojiMap::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open emoji map: " + path);
  return parse(in, path);
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open stopword list: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') words.insert(line);
  }
  return words;
}

}  // namespace olidtk
