#include <zlib.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mlar/pdf.hpp"
#include "mlar/util.hpp"

// A contained text-layer extractor. It discovers objects by scanning the
// file (which also copes with incremental updates and broken xref tables),
// loads object streams, walks the page tree and interprets the text-showing
// operators of each page's content streams. Glyph programs, CID/ToUnicode
// mapping and non-Flate/Hex filters are out of scope; strings are taken as
// Latin-1 or UTF-16BE bytes.

namespace mlar {

std::string zlib_inflate(std::string_view data) {
  auto run = [&](int window_bits, std::string& out) {
    z_stream zs{};
    if (inflateInit2(&zs, window_bits) != Z_OK) return false;
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    char buf[1 << 16];
    int rc = Z_OK;
    while (rc == Z_OK) {
      zs.next_out = reinterpret_cast<Bytef*>(buf);
      zs.avail_out = sizeof(buf);
      rc = inflate(&zs, Z_NO_FLUSH);
      if (rc != Z_OK && rc != Z_STREAM_END) break;
      out.append(buf, sizeof(buf) - zs.avail_out);
      if (rc == Z_STREAM_END) break;
      if (zs.avail_in == 0 && zs.avail_out == sizeof(buf)) break;
    }
    inflateEnd(&zs);
    // Data trimmed to /Length can miss the checksum; accept what inflated.
    return rc == Z_STREAM_END || (rc == Z_OK && !out.empty());
  };
  std::string out;
  if (run(MAX_WBITS, out)) return out;
  out.clear();
  if (run(-MAX_WBITS, out)) return out;  // raw deflate, no zlib header
  throw Error("no text", "undecodable FlateDecode stream");
}

namespace {

struct PdfValue {
  enum class Type {
    Null,
    Bool,
    Number,
    String,
    Name,
    Array,
    Dict,
    Ref,
    Stream,
  };
  Type type = Type::Null;
  bool boolean = false;
  double number = 0.0;
  std::string text;  // String bytes or Name text
  std::vector<PdfValue> array;
  std::map<std::string, PdfValue> dict;
  int ref_num = 0;
  std::string stream_raw;

  bool is(Type t) const { return type == t; }
  const PdfValue* find(const std::string& key) const {
    auto it = dict.find(key);
    return it == dict.end() ? nullptr : &it->second;
  }
};

bool is_pdf_ws(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\0';
}

bool is_pdf_delim(char c) {
  return c == '(' || c == ')' || c == '<' || c == '>' || c == '[' ||
         c == ']' || c == '{' || c == '}' || c == '/' || c == '%';
}

bool is_regular(char c) { return !is_pdf_ws(c) && !is_pdf_delim(c); }

class Lexer {
public:
  Lexer(std::string_view data, std::size_t pos = 0) : data_(data), pos_(pos) {}

  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }
  bool eof() const { return pos_ >= data_.size(); }
  char peek() const { return pos_ < data_.size() ? data_[pos_] : '\0'; }
  std::string_view data() const { return data_; }

  void skip_ws() {
    while (pos_ < data_.size()) {
      char c = data_[pos_];
      if (is_pdf_ws(c)) {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < data_.size() && data_[pos_] != '\n' &&
               data_[pos_] != '\r') {
          ++pos_;
        }
      } else {
        break;
      }
    }
  }

  bool accept_keyword(std::string_view kw) {
    skip_ws();
    if (data_.compare(pos_, kw.size(), kw) != 0) return false;
    std::size_t end = pos_ + kw.size();
    if (end < data_.size() && is_regular(data_[end])) return false;
    pos_ = end;
    return true;
  }

  // Next run of regular characters (an operator or keyword), empty at eof
  // or before a delimiter.
  std::string next_word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < data_.size() && is_regular(data_[pos_])) ++pos_;
    return std::string(data_.substr(start, pos_ - start));
  }

  PdfValue parse_value(int depth = 0);

private:
  PdfValue parse_literal_string();
  PdfValue parse_hex_string();
  PdfValue parse_name();
  PdfValue parse_number_or_ref();

  std::string_view data_;
  std::size_t pos_ = 0;
};

PdfValue Lexer::parse_literal_string() {
  ++pos_;  // '('
  PdfValue v;
  v.type = PdfValue::Type::String;
  int depth = 1;
  while (pos_ < data_.size()) {
    char c = data_[pos_++];
    if (c == '\\') {
      if (pos_ >= data_.size()) break;
      char e = data_[pos_++];
      switch (e) {
        case 'n': v.text.push_back('\n'); break;
        case 'r': v.text.push_back('\r'); break;
        case 't': v.text.push_back('\t'); break;
        case 'b': v.text.push_back('\b'); break;
        case 'f': v.text.push_back('\f'); break;
        case '\r':
          if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
          break;
        case '\n': break;
        default:
          if (e >= '0' && e <= '7') {
            int code = e - '0';
            for (int i = 0; i < 2 && pos_ < data_.size(); ++i) {
              char d = data_[pos_];
              if (d < '0' || d > '7') break;
              code = code * 8 + (d - '0');
              ++pos_;
            }
            v.text.push_back(static_cast<char>(code & 0xff));
          } else {
            v.text.push_back(e);
          }
      }
    } else if (c == '(') {
      ++depth;
      v.text.push_back(c);
    } else if (c == ')') {
      if (--depth == 0) return v;
      v.text.push_back(c);
    } else {
      v.text.push_back(c);
    }
  }
  return v;  // unterminated; keep what we have
}

PdfValue Lexer::parse_hex_string() {
  ++pos_;  // '<'
  PdfValue v;
  v.type = PdfValue::Type::String;
  int hi = -1;
  auto hex_digit = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  while (pos_ < data_.size()) {
    char c = data_[pos_++];
    if (c == '>') break;
    int d = hex_digit(c);
    if (d < 0) continue;
    if (hi < 0) {
      hi = d;
    } else {
      v.text.push_back(static_cast<char>((hi << 4) | d));
      hi = -1;
    }
  }
  if (hi >= 0) v.text.push_back(static_cast<char>(hi << 4));
  return v;
}

PdfValue Lexer::parse_name() {
  ++pos_;  // '/'
  PdfValue v;
  v.type = PdfValue::Type::Name;
  while (pos_ < data_.size() && is_regular(data_[pos_])) {
    char c = data_[pos_++];
    if (c == '#' && pos_ + 1 < data_.size()) {
      auto hex = [](char h) -> int {
        if (h >= '0' && h <= '9') return h - '0';
        if (h >= 'a' && h <= 'f') return h - 'a' + 10;
        if (h >= 'A' && h <= 'F') return h - 'A' + 10;
        return -1;
      };
      int a = hex(data_[pos_]);
      int b = hex(data_[pos_ + 1]);
      if (a >= 0 && b >= 0) {
        v.text.push_back(static_cast<char>((a << 4) | b));
        pos_ += 2;
        continue;
      }
    }
    v.text.push_back(c);
  }
  return v;
}

PdfValue Lexer::parse_number_or_ref() {
  std::size_t start = pos_;
  bool is_int = true;
  if (peek() == '+' || peek() == '-') ++pos_;
  while (pos_ < data_.size() &&
         (std::isdigit(static_cast<unsigned char>(data_[pos_])) ||
          data_[pos_] == '.')) {
    if (data_[pos_] == '.') is_int = false;
    ++pos_;
  }
  PdfValue v;
  v.type = PdfValue::Type::Number;
  v.number = std::strtod(std::string(data_.substr(start, pos_ - start)).c_str(),
                         nullptr);
  if (is_int && v.number >= 0) {
    // Look ahead for "<gen> R".
    std::size_t save = pos_;
    skip_ws();
    std::size_t gen_start = pos_;
    while (pos_ < data_.size() &&
           std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      ++pos_;
    }
    if (pos_ > gen_start) {
      skip_ws();
      if (pos_ < data_.size() && data_[pos_] == 'R' &&
          (pos_ + 1 >= data_.size() || !is_regular(data_[pos_ + 1]))) {
        ++pos_;
        PdfValue ref;
        ref.type = PdfValue::Type::Ref;
        ref.ref_num = static_cast<int>(v.number);
        return ref;
      }
    }
    pos_ = save;
  }
  return v;
}

PdfValue Lexer::parse_value(int depth) {
  if (depth > 64) throw Error("no text", "pdf structure too deep");
  skip_ws();
  if (eof()) return {};
  char c = peek();
  if (c == '(') return parse_literal_string();
  if (c == '/') return parse_name();
  if (c == '[') {
    ++pos_;
    PdfValue v;
    v.type = PdfValue::Type::Array;
    for (;;) {
      skip_ws();
      if (eof()) break;
      if (peek() == ']') {
        ++pos_;
        break;
      }
      v.array.push_back(parse_value(depth + 1));
    }
    return v;
  }
  if (c == '<') {
    if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '<') {
      pos_ += 2;
      PdfValue v;
      v.type = PdfValue::Type::Dict;
      for (;;) {
        skip_ws();
        if (eof()) break;
        if (peek() == '>') {
          if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '>') {
            pos_ += 2;
            break;
          }
          ++pos_;
          continue;
        }
        if (peek() != '/') {  // malformed key; bail out of the dict
          parse_value(depth + 1);
          continue;
        }
        PdfValue key = parse_name();
        PdfValue val = parse_value(depth + 1);
        v.dict[key.text] = std::move(val);
      }
      return v;
    }
    return parse_hex_string();
  }
  if (c == '+' || c == '-' || c == '.' ||
      std::isdigit(static_cast<unsigned char>(c))) {
    return parse_number_or_ref();
  }
  if (accept_keyword("true")) {
    PdfValue v;
    v.type = PdfValue::Type::Bool;
    v.boolean = true;
    return v;
  }
  if (accept_keyword("false")) {
    PdfValue v;
    v.type = PdfValue::Type::Bool;
    return v;
  }
  if (accept_keyword("null")) return {};
  // Unknown token; consume it so callers make progress.
  std::string w = next_word();
  if (w.empty()) ++pos_;
  return {};
}

class PdfDocument {
public:
  explicit PdfDocument(std::string_view bytes) : bytes_(bytes) {
    scan_objects();
  }

  std::vector<std::string> page_texts();

private:
  void scan_objects();
  void load_object_streams();
  const PdfValue* resolve(int num);
  const PdfValue& deref(const PdfValue& v) {
    if (v.is(PdfValue::Type::Ref)) {
      const PdfValue* r = resolve(v.ref_num);
      static const PdfValue null_value{};
      return r ? *r : null_value;
    }
    return v;
  }
  PdfValue parse_object_at(std::size_t offset);
  std::string decode_stream(const PdfValue& stream);
  const PdfValue* find_catalog();
  void collect_pages(const PdfValue& node, std::vector<const PdfValue*>& out,
                     std::set<const PdfValue*>& visited, int depth);
  std::string page_text(const PdfValue& page);

  std::string_view bytes_;
  std::map<int, std::size_t> top_offsets_;
  std::map<int, PdfValue> cache_;
  std::set<int> resolving_;
  bool objstm_loaded_ = false;
};

void PdfDocument::scan_objects() {
  std::size_t pos = 0;
  const std::size_t n = bytes_.size();
  while (pos < n) {
    char c = bytes_[pos];
    if (!std::isdigit(static_cast<unsigned char>(c)) ||
        (pos > 0 && is_regular(bytes_[pos - 1]))) {
      ++pos;
      continue;
    }
    Lexer lex(bytes_, pos);
    std::size_t obj_start = pos;
    std::string num_tok = lex.next_word();
    std::string gen_tok = lex.next_word();
    bool numeric = !num_tok.empty() && !gen_tok.empty();
    for (char d : num_tok + gen_tok) {
      if (!std::isdigit(static_cast<unsigned char>(d))) numeric = false;
    }
    if (!numeric || !lex.accept_keyword("obj")) {
      pos = obj_start + num_tok.size();
      continue;
    }
    int num = std::atoi(num_tok.c_str());
    top_offsets_[num] = obj_start;  // later definitions win
    // Skip the object body so stream bytes are never scanned.
    std::size_t body = lex.pos();
    std::size_t endobj = bytes_.find("endobj", body);
    std::size_t stream_kw = bytes_.find("stream", body);
    if (stream_kw != std::string_view::npos &&
        (endobj == std::string_view::npos || stream_kw < endobj)) {
      std::size_t endstream = bytes_.find("endstream", stream_kw + 6);
      if (endstream != std::string_view::npos) {
        endobj = bytes_.find("endobj", endstream);
      }
    }
    pos = endobj == std::string_view::npos ? body : endobj + 6;
  }
}

PdfValue PdfDocument::parse_object_at(std::size_t offset) {
  Lexer lex(bytes_, offset);
  lex.next_word();  // object number
  lex.next_word();  // generation
  lex.accept_keyword("obj");
  PdfValue v = lex.parse_value();
  if (v.is(PdfValue::Type::Dict)) {
    std::size_t save = lex.pos();
    if (lex.accept_keyword("stream")) {
      std::size_t data_start = lex.pos();
      if (data_start < bytes_.size() && bytes_[data_start] == '\r') {
        ++data_start;
      }
      if (data_start < bytes_.size() && bytes_[data_start] == '\n') {
        ++data_start;
      }
      std::size_t data_end = std::string_view::npos;
      if (const PdfValue* len = v.find("Length")) {
        const PdfValue& resolved = deref(*len);
        if (resolved.is(PdfValue::Type::Number) && resolved.number >= 0) {
          std::size_t candidate = data_start +
                                  static_cast<std::size_t>(resolved.number);
          if (candidate <= bytes_.size()) {
            Lexer check(bytes_, candidate);
            if (check.accept_keyword("endstream")) data_end = candidate;
          }
        }
      }
      if (data_end == std::string_view::npos) {
        data_end = bytes_.find("endstream", data_start);
        if (data_end == std::string_view::npos) data_end = bytes_.size();
        while (data_end > data_start && (bytes_[data_end - 1] == '\n' ||
                                         bytes_[data_end - 1] == '\r')) {
          --data_end;
        }
      }
      v.type = PdfValue::Type::Stream;
      v.stream_raw.assign(bytes_.substr(data_start, data_end - data_start));
    } else {
      lex.seek(save);
    }
  }
  return v;
}

const PdfValue* PdfDocument::resolve(int num) {
  auto cached = cache_.find(num);
  if (cached != cache_.end()) return &cached->second;
  if (resolving_.count(num)) return nullptr;  // reference cycle
  resolving_.insert(num);
  const PdfValue* result = nullptr;
  auto at = top_offsets_.find(num);
  if (at != top_offsets_.end()) {
    try {
      PdfValue v = parse_object_at(at->second);
      result = &(cache_[num] = std::move(v));
    } catch (const Error&) {
      result = nullptr;
    }
  }
  if (!result && !objstm_loaded_) {
    resolving_.erase(num);
    load_object_streams();
    auto it = cache_.find(num);
    return it == cache_.end() ? nullptr : &it->second;
  }
  resolving_.erase(num);
  return result;
}

void PdfDocument::load_object_streams() {
  if (objstm_loaded_) return;
  objstm_loaded_ = true;
  std::vector<int> stream_nums;
  for (const auto& [num, offset] : top_offsets_) stream_nums.push_back(num);
  for (int num : stream_nums) {
    const PdfValue* obj = resolve(num);
    if (!obj || !obj->is(PdfValue::Type::Stream)) continue;
    const PdfValue* type = obj->find("Type");
    if (!type || type->text != "ObjStm") continue;
    const PdfValue* count = obj->find("N");
    const PdfValue* first = obj->find("First");
    if (!count || !first) continue;
    std::string decoded;
    try {
      decoded = decode_stream(*obj);
    } catch (const Error&) {
      continue;
    }
    Lexer header(decoded);
    std::size_t first_off = static_cast<std::size_t>(deref(*first).number);
    int n = static_cast<int>(deref(*count).number);
    std::vector<std::pair<int, std::size_t>> entries;
    for (int i = 0; i < n; ++i) {
      PdfValue obj_num = header.parse_value();
      PdfValue obj_off = header.parse_value();
      if (!obj_num.is(PdfValue::Type::Number) ||
          !obj_off.is(PdfValue::Type::Number)) {
        break;
      }
      entries.emplace_back(static_cast<int>(obj_num.number),
                           static_cast<std::size_t>(obj_off.number));
    }
    for (const auto& [obj_num, off] : entries) {
      if (cache_.count(obj_num) || top_offsets_.count(obj_num)) continue;
      if (first_off + off >= decoded.size()) continue;
      Lexer body(decoded, first_off + off);
      try {
        cache_[obj_num] = body.parse_value();
      } catch (const Error&) {
      }
    }
  }
}

namespace {

std::string ascii85_decode(const std::string& data) {
  std::string out;
  out.reserve(data.size() * 4 / 5);
  std::uint32_t group = 0;
  int count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    char c = data[i];
    if (is_pdf_ws(c)) continue;
    if (c == '~') break;  // "~>" terminator
    if (c == 'z' && count == 0) {
      out.append(4, '\0');
      continue;
    }
    if (c < '!' || c > 'u') continue;
    group = group * 85 + static_cast<std::uint32_t>(c - '!');
    if (++count == 5) {
      for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<char>((group >> shift) & 0xff));
      }
      group = 0;
      count = 0;
    }
  }
  if (count > 1) {
    // partial group: pad with 'u', emit count-1 bytes
    for (int i = count; i < 5; ++i) group = group * 85 + 84;
    for (int shift = 24, emitted = 0; emitted < count - 1;
         shift -= 8, ++emitted) {
      out.push_back(static_cast<char>((group >> shift) & 0xff));
    }
  }
  return out;
}

}  // namespace

std::string PdfDocument::decode_stream(const PdfValue& stream) {
  std::vector<std::string> filters;
  if (const PdfValue* f = stream.find("Filter")) {
    const PdfValue& filter = deref(*f);
    if (filter.is(PdfValue::Type::Name)) {
      filters.push_back(filter.text);
    } else if (filter.is(PdfValue::Type::Array)) {
      for (const auto& item : filter.array) {
        filters.push_back(deref(item).text);
      }
    }
  }
  std::string data = stream.stream_raw;
  for (const auto& name : filters) {
    if (name == "FlateDecode" || name == "Fl") {
      data = zlib_inflate(data);
    } else if (name == "ASCII85Decode" || name == "A85") {
      data = ascii85_decode(data);
    } else if (name == "ASCIIHexDecode" || name == "AHx") {
      std::string out;
      int hi = -1;
      for (char c : data) {
        if (c == '>') break;
        int d = -1;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0) continue;
        if (hi < 0) {
          hi = d;
        } else {
          out.push_back(static_cast<char>((hi << 4) | d));
          hi = -1;
        }
      }
      if (hi >= 0) out.push_back(static_cast<char>(hi << 4));
      data = std::move(out);
    } else {
      throw Error("no text", "unsupported stream filter " + name);
    }
  }
  return data;
}

const PdfValue* PdfDocument::find_catalog() {
  // Prefer the /Root of the last trailer.
  std::size_t t = bytes_.rfind("trailer");
  while (t != std::string_view::npos) {
    Lexer lex(bytes_, t + 7);
    try {
      PdfValue dict = lex.parse_value();
      if (dict.find("Encrypt")) {
        throw Error("no text", "encrypted PDF");
      }
      if (const PdfValue* root = dict.find("Root")) {
        const PdfValue& catalog = deref(*root);
        if (catalog.is(PdfValue::Type::Dict)) return resolve(root->ref_num);
      }
    } catch (const Error& e) {
      if (std::string_view(e.code()) == "no text") throw;
    }
    t = t == 0 ? std::string_view::npos : bytes_.rfind("trailer", t - 1);
  }
  // Cross-reference-stream files: the /Root lives in the /Type /XRef dict.
  for (const auto& [num, offset] : top_offsets_) {
    const PdfValue* obj = resolve(num);
    if (!obj) continue;
    const PdfValue* type = obj->find("Type");
    if (type && type->text == "XRef") {
      if (obj->find("Encrypt")) throw Error("no text", "encrypted PDF");
      if (const PdfValue* root = obj->find("Root")) {
        if (root->is(PdfValue::Type::Ref)) return resolve(root->ref_num);
      }
    }
  }
  for (const auto& [num, offset] : top_offsets_) {
    const PdfValue* obj = resolve(num);
    if (!obj) continue;
    const PdfValue* type = obj->find("Type");
    if (type && type->text == "Catalog") return obj;
  }
  // The catalog itself may live inside an object stream.
  load_object_streams();
  for (const auto& [num, obj] : cache_) {
    const PdfValue* type = obj.find("Type");
    if (type && type->text == "Catalog") return &obj;
  }
  return nullptr;
}

void PdfDocument::collect_pages(const PdfValue& node,
                                std::vector<const PdfValue*>& out,
                                std::set<const PdfValue*>& visited,
                                int depth) {
  if (depth > 64 || visited.count(&node)) return;
  visited.insert(&node);
  const PdfValue* type = node.find("Type");
  if (type && type->text == "Page") {
    out.push_back(&node);
    return;
  }
  if (const PdfValue* kids = node.find("Kids")) {
    const PdfValue& arr = deref(*kids);
    for (const auto& kid : arr.array) {
      const PdfValue& child = deref(kid);
      if (child.is(PdfValue::Type::Dict) || child.is(PdfValue::Type::Stream)) {
        collect_pages(child, out, visited, depth + 1);
      }
    }
  }
}

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

void append_shown_text(std::string& out, const std::string& bytes) {
  if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0xfe &&
      static_cast<unsigned char>(bytes[1]) == 0xff) {
    for (std::size_t i = 2; i + 1 < bytes.size(); i += 2) {
      std::uint32_t unit = (static_cast<unsigned char>(bytes[i]) << 8) |
                           static_cast<unsigned char>(bytes[i + 1]);
      if (unit >= 0xd800 && unit <= 0xdbff && i + 3 < bytes.size()) {
        std::uint32_t low = (static_cast<unsigned char>(bytes[i + 2]) << 8) |
                            static_cast<unsigned char>(bytes[i + 3]);
        if (low >= 0xdc00 && low <= 0xdfff) {
          append_utf8(out,
                      0x10000 + ((unit - 0xd800) << 10) + (low - 0xdc00));
          i += 2;
          continue;
        }
      }
      append_utf8(out, unit);
    }
    return;
  }
  for (char c : bytes) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (uc < 0x80) {
      out.push_back(c);
    } else {
      append_utf8(out, uc);  // Latin-1 fallback
    }
  }
}

// Interprets the text operators of one decoded content stream.
std::string content_to_text(const std::string& content) {
  Lexer lex(content);
  std::vector<PdfValue> stack;
  std::string out;
  double tm_y = 0.0;
  bool have_tm_y = false;
  double cm_y = 0.0;
  bool have_cm_y = false;

  auto newline = [&] {
    if (!out.empty() && out.back() != '\n') out.push_back('\n');
  };
  auto num_operand = [&](std::size_t from_end) -> double {
    if (stack.size() < from_end) return 0.0;
    const PdfValue& v = stack[stack.size() - from_end];
    return v.is(PdfValue::Type::Number) ? v.number : 0.0;
  };

  while (!lex.eof()) {
    lex.skip_ws();
    if (lex.eof()) break;
    char c = lex.peek();
    if (c == '(' || c == '<' || c == '[' || c == '/' || c == '+' ||
        c == '-' || c == '.' ||
        std::isdigit(static_cast<unsigned char>(c))) {
      stack.push_back(lex.parse_value());
      continue;
    }
    std::string op = lex.next_word();
    if (op.empty()) {
      lex.seek(lex.pos() + 1);
      continue;
    }
    if (op == "BI") {
      // Inline image: skip binary data through the EI marker.
      std::size_t ei = content.find("EI", lex.pos());
      lex.seek(ei == std::string::npos ? content.size() : ei + 2);
      stack.clear();
      continue;
    }
    if (op == "Tj") {
      if (!stack.empty() && stack.back().is(PdfValue::Type::String)) {
        append_shown_text(out, stack.back().text);
      }
    } else if (op == "'") {
      newline();
      if (!stack.empty() && stack.back().is(PdfValue::Type::String)) {
        append_shown_text(out, stack.back().text);
      }
    } else if (op == "\"") {
      newline();
      if (!stack.empty() && stack.back().is(PdfValue::Type::String)) {
        append_shown_text(out, stack.back().text);
      }
    } else if (op == "TJ") {
      if (!stack.empty() && stack.back().is(PdfValue::Type::Array)) {
        for (const auto& item : stack.back().array) {
          if (item.is(PdfValue::Type::String)) {
            append_shown_text(out, item.text);
          } else if (item.is(PdfValue::Type::Number) && item.number < -150) {
            if (!out.empty() && out.back() != ' ' && out.back() != '\n') {
              out.push_back(' ');
            }
          }
        }
      }
    } else if (op == "Td" || op == "TD") {
      if (num_operand(1) != 0.0) newline();
    } else if (op == "T*") {
      newline();
    } else if (op == "Tm") {
      double y = num_operand(1);
      if (have_tm_y && std::abs(y - tm_y) > 0.5) newline();
      tm_y = y;
      have_tm_y = true;
    } else if (op == "cm") {
      // producers that translate with cm and show at Td 0 0 move lines here
      double y = num_operand(1);
      if (have_cm_y && std::abs(y - cm_y) > 0.5) newline();
      cm_y = y;
      have_cm_y = true;
    } else if (op == "BT") {
      // position state restarts with each text object
    } else if (op == "ET") {
      // no-op
    }
    stack.clear();
  }
  return out;
}

}  // namespace

std::string PdfDocument::page_text(const PdfValue& page) {
  std::vector<const PdfValue*> streams;
  if (const PdfValue* contents = page.find("Contents")) {
    const PdfValue& c = deref(*contents);
    if (c.is(PdfValue::Type::Stream)) {
      streams.push_back(&c);
    } else if (c.is(PdfValue::Type::Array)) {
      for (const auto& item : c.array) {
        const PdfValue& s = deref(item);
        if (s.is(PdfValue::Type::Stream)) streams.push_back(&s);
      }
    }
  }
  std::string content;
  for (const PdfValue* s : streams) {
    try {
      content += decode_stream(*s);
      content.push_back('\n');
    } catch (const Error&) {
      // undecodable content stream: no text from it
    }
  }
  return content_to_text(content);
}

std::vector<std::string> PdfDocument::page_texts() {
  std::vector<const PdfValue*> pages;
  std::set<const PdfValue*> visited;
  if (const PdfValue* catalog = find_catalog()) {
    if (const PdfValue* root = catalog->find("Pages")) {
      const PdfValue& tree = deref(*root);
      if (tree.is(PdfValue::Type::Dict)) {
        collect_pages(tree, pages, visited, 0);
      }
    }
  }
  if (pages.empty()) {
    // No usable page tree: fall back to every /Type /Page object in order.
    load_object_streams();
    for (const auto& [num, offset] : top_offsets_) {
      resolve(num);
    }
    for (const auto& [num, obj] : cache_) {
      const PdfValue* type = obj.find("Type");
      if (type && type->text == "Page") pages.push_back(&obj);
    }
  }
  std::vector<std::string> texts;
  texts.reserve(pages.size());
  for (const PdfValue* page : pages) {
    texts.push_back(trim(page_text(*page)));
  }
  return texts;
}

}  // namespace

std::string extract_pdf_text(std::string_view bytes) {
  PdfDocument doc(bytes);
  std::vector<std::string> pages = doc.page_texts();
  std::string out;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (i) out.push_back('\f');
    out += pages[i];
  }
  out = trim(out);
  if (out.empty()) throw Error("no text", "no extractable text layer");
  return out;
}

}  // namespace mlar
