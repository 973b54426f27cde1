#pragma once

// UTF-8 helpers backed by ICU.

#include <string>
#include <string_view>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "instasum/error.hpp"

namespace instasum::unicode {

/// Decodes a UTF-8 string into code points; malformed sequences become U+FFFD.
inline std::u32string decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

inline void append(std::string& out, char32_t cp) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (!error) out.append(buf, static_cast<std::size_t>(n));
}

inline std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append(out, cp);
  return out;
}

/// Number of Unicode scalar values.
inline std::size_t char_count(std::string_view text) {
  std::size_t n = 0;
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    ++n;
  }
  return n;
}

inline bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }

/// General category Cc, excluding whitespace such as TAB and LF.
inline bool is_control(char32_t cp) {
  return u_charType(static_cast<UChar32>(cp)) == U_CONTROL_CHAR && !is_space(cp);
}

inline bool is_punct(char32_t cp) { return u_ispunct(static_cast<UChar32>(cp)); }

inline std::string nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString dst = normalizer->normalize(src, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  dst.toUTF8String(out);
  return out;
}

/// Full Unicode lowercase mapping using the root locale.
inline std::string lowercase(std::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s.toLower(icu::Locale::getRoot());
  std::string out;
  s.toUTF8String(out);
  return out;
}

/// Collapses whitespace runs to one ASCII space and trims both ends.
inline std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t cp : decode(text)) {
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append(out, cp);
  }
  return out;
}

}  // namespace instasum::unicode
