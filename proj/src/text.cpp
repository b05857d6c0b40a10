#include "ideoaudit/text.hpp"

#include <unicode/brkiter.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include <memory>

#include "ideoaudit/errors.hpp"

namespace ideoaudit::text {

namespace {

icu::UnicodeString from_utf8(std::string_view s) {
  return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

std::string to_utf8(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

bool is_punct(UChar32 c) { return u_ispunct(c) != 0; }

std::unique_ptr<icu::BreakIterator> make_word_iterator() {
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::BreakIterator> it(icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
  if (U_FAILURE(status) || !it) throw Error("ICU word break iterator unavailable");
  return it;
}

}  // namespace

std::string casefold(std::string_view utf8) {
  icu::UnicodeString u = from_utf8(utf8);
  u.foldCase(U_FOLD_CASE_DEFAULT);
  return to_utf8(u);
}

std::string trim(std::string_view utf8) {
  const icu::UnicodeString u = from_utf8(utf8);
  int32_t begin = 0;
  int32_t end = u.length();
  while (begin < end && is_space(u.char32At(begin))) begin = u.moveIndex32(begin, 1);
  while (end > begin) {
    const int32_t prev = u.moveIndex32(end, -1);
    if (!is_space(u.char32At(prev))) break;
    end = prev;
  }
  return to_utf8(icu::UnicodeString(u, begin, end - begin));
}

std::string canonical_key(std::string_view utf8) {
  icu::UnicodeString u = from_utf8(utf8);
  u.foldCase(U_FOLD_CASE_DEFAULT);

  int32_t begin = 0;
  int32_t end = u.length();
  while (begin < end) {
    const UChar32 c = u.char32At(begin);
    if (!is_space(c) && !is_punct(c)) break;
    begin = u.moveIndex32(begin, 1);
  }
  while (end > begin) {
    const int32_t prev = u.moveIndex32(end, -1);
    const UChar32 c = u.char32At(prev);
    if (!is_space(c) && !is_punct(c)) break;
    end = prev;
  }

  icu::UnicodeString out;
  bool in_space = false;
  for (int32_t i = begin; i < end; i = u.moveIndex32(i, 1)) {
    const UChar32 c = u.char32At(i);
    if (is_space(c)) {
      in_space = true;
      continue;
    }
    if (in_space) out.append(static_cast<UChar32>(' '));
    in_space = false;
    out.append(c);
  }
  return to_utf8(out);
}

std::vector<std::string> word_tokens(std::string_view utf8) {
  std::vector<std::string> tokens;
  if (utf8.empty()) return tokens;
  thread_local std::unique_ptr<icu::BreakIterator> iter = make_word_iterator();

  icu::UnicodeString u = from_utf8(utf8);
  iter->setText(u);
  int32_t start = iter->first();
  for (int32_t end = iter->next(); end != icu::BreakIterator::DONE; start = end, end = iter->next()) {
    icu::UnicodeString segment(u, start, end - start);
    bool has_alnum = false;
    for (int32_t i = 0; i < segment.length(); i = segment.moveIndex32(i, 1)) {
      if (u_isalnum(segment.char32At(i))) {
        has_alnum = true;
        break;
      }
    }
    if (!has_alnum) continue;
    segment.foldCase(U_FOLD_CASE_DEFAULT);
    tokens.push_back(to_utf8(segment));
  }
  return tokens;
}

}  // namespace ideoaudit::text
