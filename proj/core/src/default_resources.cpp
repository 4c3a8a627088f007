#include <sstream>

#include "olidtk/preprocess.hpp"

namespace olidtk {

namespace {

// Same content as data/emoji_map.tsv (kept in sync by a test). Phrases are
// lowercase letters and spaces; multi-codepoint sequences are listed with
// and without the VS16 selector where both occur in the wild.
const char* const kEmojiMapTsv =
    "\xF0\x9F\x98\x82\tface with tears of joy\n"      // 😂
    "\xF0\x9F\xA4\xA3\trolling on the floor laughing\n"  // 🤣
    "\xE2\x9D\xA4\xEF\xB8\x8F\tred heart\n"           // ❤️
    "\xE2\x9D\xA4\tred heart\n"                       // ❤
    "\xF0\x9F\x98\x8D\tsmiling face with heart eyes\n"   // 😍
    "\xF0\x9F\x98\xAD\tloudly crying face\n"          // 😭
    "\xF0\x9F\x98\x98\tface blowing a kiss\n"         // 😘
    "\xF0\x9F\x98\x8A\tsmiling face with smiling eyes\n"  // 😊
    "\xF0\x9F\x91\x8C\tok hand\n"                     // 👌
    "\xF0\x9F\x92\x95\ttwo hearts\n"                  // 💕
    "\xF0\x9F\x91\x8F\tclapping hands\n"              // 👏
    "\xF0\x9F\x98\x81\tbeaming face\n"                // 😁
    "\xF0\x9F\x94\xA5\tfire\n"                        // 🔥
    "\xF0\x9F\x92\xAF\thundred points\n"              // 💯
    "\xF0\x9F\x99\x8F\tfolded hands\n"                // 🙏
    "\xF0\x9F\x98\xA9\tweary face\n"                  // 😩
    "\xE2\x9C\x8C\xEF\xB8\x8F\tvictory hand\n"        // ✌️
    "\xE2\x9C\x8C\tvictory hand\n"                    // ✌
    "\xF0\x9F\x98\x8F\tsmirking face\n"               // 😏
    "\xF0\x9F\x98\x89\twinking face\n"                // 😉
    "\xF0\x9F\x99\x8C\traising hands\n"               // 🙌
    "\xF0\x9F\x99\x88\tsee no evil monkey\n"          // 🙈
    "\xF0\x9F\x92\xAA\tflexed biceps\n"               // 💪
    "\xF0\x9F\x98\x84\tgrinning face with smiling eyes\n"  // 😄
    "\xF0\x9F\x98\x92\tunamused face\n"               // 😒
    "\xF0\x9F\x92\x96\tsparkling heart\n"             // 💖
    "\xF0\x9F\x98\x83\tgrinning face with big eyes\n"     // 😃
    "\xF0\x9F\x98\x94\tpensive face\n"                // 😔
    "\xF0\x9F\x98\xB1\tface screaming in fear\n"      // 😱
    "\xF0\x9F\x8E\x89\tparty popper\n"                // 🎉
    "\xF0\x9F\x98\x9C\twinking face with tongue\n"    // 😜
    "\xF0\x9F\x98\xB3\tflushed face\n"                // 😳
    "\xF0\x9F\x92\x99\tblue heart\n"                  // 💙
    "\xF0\x9F\x92\x9C\tpurple heart\n"                // 💜
    "\xF0\x9F\x98\x8E\tsmiling face with sunglasses\n"    // 😎
    "\xF0\x9F\x91\x8D\tthumbs up\n"                   // 👍
    "\xF0\x9F\x91\x8E\tthumbs down\n"                 // 👎
    "\xF0\x9F\x98\xA2\tcrying face\n"                 // 😢
    "\xF0\x9F\x98\x85\tgrinning face with sweat\n"    // 😅
    "\xF0\x9F\x99\x84\tface with rolling eyes\n"      // 🙄
    "\xF0\x9F\x98\xA1\tpouting face\n"                // 😡
    "\xF0\x9F\x98\xA0\tangry face\n"                  // 😠
    "\xF0\x9F\xA4\x94\tthinking face\n"               // 🤔
    "\xF0\x9F\x98\xB4\tsleeping face\n"               // 😴
    "\xF0\x9F\x98\xAC\tgrimacing face\n"              // 😬
    "\xF0\x9F\x92\x80\tskull\n"                       // 💀
    "\xF0\x9F\x92\xA9\tpile of poo\n"                 // 💩
    "\xF0\x9F\x91\x80\teyes\n"                        // 👀
    "\xE2\x9C\xA8\tsparkles\n"                        // ✨
    "\xF0\x9F\x8C\xB9\trose\n"                        // 🌹
    "\xF0\x9F\x92\x94\tbroken heart\n"                // 💔
    "\xF0\x9F\x98\x80\tgrinning face\n"               // 😀
    "\xF0\x9F\x98\x86\tgrinning squinting face\n"     // 😆
    "\xF0\x9F\x96\x95\tmiddle finger\n"               // 🖕
    "\xF0\x9F\xA4\xA1\tclown face\n"                  // 🤡
    "\xF0\x9F\x99\x83\tupside down face\n";           // 🙃

// Same content as data/stopwords_en.txt. Contractions appear in their
// apostrophe-stripped form because that is what the pipeline produces.
const char* const kStopwords =
    "a about above after again against aint all am an and any are arent as at be because been "
    "before being below between both but by can cannot cant could couldnt did didnt do does "
    "doesnt doing dont down during each few for from further had hadnt has hasnt have havent "
    "having he hed hell her here hers herself hes him himself his how hows i id if ill im in "
    "into is isnt it its itself ive just me more most mustnt my myself no nor not now of off on "
    "once only or other ought our ours ourselves out over own same shant she shes should "
    "shouldnt so some such than that thats the their theirs them themselves then there theres "
    "these they theyd theyll theyre theyve this those through to too under until up very was "
    "wasnt we wed well were werent weve what whats when whens where wheres which while who whom "
    "whos why whys will with wont would wouldnt you youd youll your youre yours yourself "
    "yourselves youve";

}  // namespace

const EmojiMap& EmojiMap::builtin() {
  static const EmojiMap map = [] {
    std::istringstream in(kEmojiMapTsv);
    return EmojiMap::parse(in, "<builtin emoji map>");
  }();
  return map;
}

const std::set<std::string>& builtin_stopwords() {
  static const std::set<std::string> words = [] {
    std::set<std::string> out;
    std::istringstream in(kStopwords);
    std::string w;
    while (in >> w) out.insert(w);
    return out;
  }();
  return words;
}

}  // namespace olidtk
