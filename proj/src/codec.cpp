#include "relight/codec.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <jpeglib.h>
#include <png.h>

namespace relight {

namespace {

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

struct PngMemReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t off;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t n) {
    auto* r = static_cast<PngMemReader*>(png_get_io_ptr(png));
    if (r->off + n > r->size) png_error(png, "unexpected end of stream");
    std::memcpy(out, r->data + r->off, n);
    r->off += n;
}

void png_mem_write(png_structp png, png_bytep data, png_size_t n) {
    auto* v = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    v->insert(v->end(), data, data + n);
}

void png_mem_flush(png_structp) {}

void png_store_error(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg ? msg : "unknown error";
    longjmp(png_jmpbuf(png), 1);
}

void png_ignore_warning(png_structp, png_const_charp) {}

ImageF decode_png(const std::uint8_t* bytes, std::size_t size) {
    std::string errmsg;
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, &errmsg, png_store_error, png_ignore_warning);
    if (!png) throw CodecError("PNG decode failed: cannot allocate read state");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw CodecError("PNG decode failed: cannot allocate info state");
    }

    std::vector<std::uint8_t> raw;
    std::vector<png_bytep> rows;
    PngMemReader reader{bytes, size, 0};

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CodecError("PNG decode failed: " + errmsg);
    }

    png_set_read_fn(png, &reader, png_mem_read);
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB: expand palette/gray/tRNS, strip 16-bit
    // depth and alpha.
    png_set_expand(png);
    png_set_strip_16(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (png_get_channels(png, info) != 3 || png_get_bit_depth(png, info) != 8) {
        png_error(png, "unsupported pixel layout after expansion");
    }

    raw.resize(static_cast<std::size_t>(w) * h * 3);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageF out(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < raw.size(); ++i) out.data[i] = raw[i] / 255.0;
    return out;
}

std::vector<std::uint8_t> encode_png_bytes(const std::uint8_t* raw, int width, int height) {
    std::string errmsg;
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &errmsg, png_store_error, png_ignore_warning);
    if (!png) throw CodecError("PNG encode failed: cannot allocate write state");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw CodecError("PNG encode failed: cannot allocate info state");
    }

    std::vector<std::uint8_t> out;
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) {
        rows[y] = const_cast<png_bytep>(raw + static_cast<std::size_t>(y) * width * 3);
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw CodecError("PNG encode failed: " + errmsg);
    }

    png_set_write_fn(png, &out, png_mem_write, png_mem_flush);
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

// ---------------------------------------------------------------------------
// JPEG
// ---------------------------------------------------------------------------

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_on_error(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    longjmp(err->jump, 1);
}

void jpeg_swallow_message(j_common_ptr) {}

ImageF decode_jpeg(const std::uint8_t* bytes, std::size_t size) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    jerr.message[0] = '\0';
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_on_error;
    jerr.pub.output_message = jpeg_swallow_message;

    std::vector<std::uint8_t> raw;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw CodecError(std::string("JPEG decode failed: ") + jerr.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes, static_cast<unsigned long>(size));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    raw.resize(static_cast<std::size_t>(w) * h * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = raw.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);

    ImageF out(w, h);
    for (std::size_t i = 0; i < raw.size(); ++i) out.data[i] = raw[i] / 255.0;
    return out;
}

bool looks_like_png(const std::uint8_t* b, std::size_t n) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    return n >= 8 && std::memcmp(b, sig, 8) == 0;
}

bool looks_like_jpeg(const std::uint8_t* b, std::size_t n) {
    return n >= 3 && b[0] == 0xff && b[1] == 0xd8 && b[2] == 0xff;
}

}  // namespace

ImageF decode_srgb8(const std::uint8_t* bytes, std::size_t size) {
    if (looks_like_png(bytes, size)) return decode_png(bytes, size);
    if (looks_like_jpeg(bytes, size)) return decode_jpeg(bytes, size);
    throw CodecError("signature check failed: not a PNG or JPEG stream");
}

ImageF decode_srgb8(const std::vector<std::uint8_t>& bytes) {
    return decode_srgb8(bytes.data(), bytes.size());
}

std::vector<std::uint8_t> encode_srgb8(const ImageF& img) {
    if (img.width <= 0 || img.height <= 0 || img.data.size() != img.pixel_count() * 3) {
        throw CodecError("PNG encode failed: malformed image buffer");
    }
    std::vector<std::uint8_t> raw(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const long q = std::lround(img.data[i] * 255.0);
        raw[i] = static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
    }
    return encode_png_bytes(raw.data(), img.width, img.height);
}

ImageF load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CodecError("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return decode_srgb8(bytes);
    } catch (const CodecError& e) {
        throw CodecError(path + ": " + e.what());
    }
}

void save_png(const std::string& path, const ImageF& img) {
    const std::vector<std::uint8_t> bytes = encode_srgb8(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CodecError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CodecError("short write: " + path);
}

std::vector<std::uint8_t> encode_indexed_png(const std::vector<int>& indices, int width,
                                             int height) {
    if (width <= 0 || height <= 0 ||
        indices.size() != static_cast<std::size_t>(width) * height) {
        throw CodecError("PNG encode failed: malformed index buffer");
    }

    std::string errmsg;
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &errmsg, png_store_error, png_ignore_warning);
    if (!png) throw CodecError("PNG encode failed: cannot allocate write state");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw CodecError("PNG encode failed: cannot allocate info state");
    }

    // Categorical palette, repeated with dimming for indices past the base set.
    static const std::uint8_t base[12][3] = {
        {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
        {245, 130, 48}, {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
        {210, 245, 60}, {250, 190, 212}, {0, 128, 128},  {220, 190, 255}};
    png_color palette[256];
    for (int i = 0; i < 256; ++i) {
        const std::uint8_t* c = base[i % 12];
        const double scale = 1.0 / (1 + i / 12);
        palette[i].red = static_cast<png_byte>(c[0] * scale);
        palette[i].green = static_cast<png_byte>(c[1] * scale);
        palette[i].blue = static_cast<png_byte>(c[2] * scale);
    }

    std::vector<std::uint8_t> raw(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        raw[i] = static_cast<std::uint8_t>(std::clamp(indices[i], 0, 255));
    }
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = raw.data() + static_cast<std::size_t>(y) * width;

    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw CodecError("PNG encode failed: " + errmsg);
    }
    png_set_write_fn(png, &out, png_mem_write, png_mem_flush);
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_PLTE(png, info, palette, 256);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace relight
