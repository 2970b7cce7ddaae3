"""Regenerate crates/core/tests/data/stem_golden.tsv from the Sastrawi reference stemmer.

Word list = a hand-picked set of common affixed Indonesian words plus deterministic
affix combinations over a seeded sample of root words. Output: word<TAB>stem, sorted.
"""
import os
import random

from Sastrawi.Stemmer.Stemmer import Stemmer
from Sastrawi.Stemmer.StemmerFactory import StemmerFactory

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "crates", "core", "tests", "data", "stem_golden.tsv")

HAND = """
makanan memberikan makan minuman pemerintah pemerintahan kebijakan masyarakat pendidikan
bergizi gratis programnya anak-anak sekolahnya dibagikan pembagian menyediakan penyediaan
kesehatan pelaksanaan dilaksanakan melaksanakan terlaksana keberhasilan berhasil kegagalan
menggunakan penggunaan digunakan pengawasan diawasi mengawasi mempengaruhi pengaruhnya
mempertanyakan pertanyaan bertanya ditanyakan menanyakan kebanyakan sebanyak membantu bantuan
dibantu pembantu menyalahgunakan disalahgunakan korupsinya dikorupsi mengkorupsi keuangan
anggarannya menganggarkan dianggarkan penganggaran perbaikan memperbaiki diperbaiki
kesejahteraan menyejahterakan mensejahterakan bersyukur mensyukuri disyukuri bersama kebersamaan
menyenangkan kesenangan senangnya disenangi mengecewakan kekecewaan kecewanya menyedihkan
kesedihan bersedih pelajar pelajaran belajar mempelajari dipelajari mengajar pengajar pengajaran
ajarannya menulis penulis tulisan ditulis menuliskan membaca pembaca bacaan dibaca membacakan
mendengar pendengar pendengaran didengar mendengarkan perdengarkan memperdengarkan
menjalankan dijalankan perjalanan berjalan menyatakan pernyataan dinyatakan kenyataannya
menyebabkan penyebab disebabkan sebabnya mengatakan dikatakan perkataan berkata katanya
menginginkan keinginan diinginkan menemukan penemuan ditemukan bertemu pertemuan
mengirimkan pengiriman dikirim kiriman mengembalikan pengembalian dikembalikan kembalinya
memperlihatkan diperlihatkan terlihat kelihatan penglihatan melihat dilihat lihatlah
bagaimanakah siapakah apakah itulah inilah walaupun meskipun bukankah janganlah
rumahku rumahmu rumahnya bukuku bukumu bukunya milikmu milikku miliknya
mencintai dicintai cintanya percintaan kecintaan penyanyi bernyanyi menyanyikan nyanyian
menyapu penyapu disapu menyusun penyusun susunan disusun tersusun penyusunan
memukul pemukul dipukul pukulan terpukul mempunyai dipunyai kepunyaan
meminum peminum diminum terminum menikmati dinikmati kenikmatan nikmatnya
mengecat pengecat dicat mengebom pengebom dibom mengepel dipel
menerangkan penerangan diterangkan keterangan terang menerima penerimaan diterima
penerima mengambil pengambilan diambil terambil ambilkan
pembangunan membangun dibangun bangunan terbangun kebangkitan membangkitkan
memberantas pemberantasan diberantas bertanggungjawab pertanggungjawaban
kedudukan berkedudukan menduduki diduduki penduduk kependudukan
mengerikan ketakutan menakutkan ditakuti penakut bertakwa
kemerdekaan merdeka memerdekakan dimerdekakan kesempatan berkesempatan
mengharapkan harapan diharapkan berharap pengharapan kehidupan menghidupkan hidupnya
kemiskinan memiskinkan termiskin ketidakadilan keadilan mengadili diadili pengadilan
perekonomian berekonomi perusahaan berusaha mengusahakan diusahakan pengusaha
pertumbuhan bertumbuh menumbuhkan ditumbuhkan tumbuhan tertinggi meninggikan ketinggian
sebaiknya terbaik kebaikan memperbaiki berbaik perbaikannya sepertinya seharusnya
kemampuan mampukah dimampukan bermain permainan memainkan dimainkan pemain mainan
ketahui diketahui mengetahui pengetahuan berpengetahuan ketahuilah
bermaaf memaafkan dimaafkan permaafan pemaaf berterimakasih
menggemaskan gemasnya menggembirakan kegembiraan bergembira penggembira
menyambut sambutan disambut penyambutan tersambut menyampaikan disampaikan penyampaian
mengkritik kritikan dikritik pengkritik mengkritisi memproteksi diproteksi proteksinya
mentaati ditaati ketaatan mensyaratkan persyaratan disyaratkan
menyala nyalakan dinyalakan penyalaan meniru-nirukan berbalas-balasan
"""

PATTERNS = [
    "me{}", "me{}kan", "me{}i", "di{}", "di{}kan", "di{}i", "ber{}", "ber{}an", "ter{}",
    "pe{}", "pe{}an", "per{}an", "ke{}an", "se{}", "{}an", "{}kan", "{}nya", "{}lah",
    "mem{}", "men{}", "meng{}", "meny{}", "pem{}", "pen{}", "peng{}", "peny{}",
    "memper{}kan", "diper{}kan", "{}kah", "{}pun", "{}ku", "{}mu",
]


class SetDictionary:
    # same membership semantics as Sastrawi's ArrayDictionary, with O(1) lookup
    def __init__(self, words):
        self.words = {w for w in words if w and w.strip() != ""}

    def contains(self, word):
        return word in self.words


def main():
    stemmer = Stemmer(SetDictionary(StemmerFactory().get_words()))
    words = set(HAND.split())
    with open(os.path.join(HERE, "..", "crates", "core", "data", "root_words.txt")) as f:
        roots = [w for w in f.read().split() if w.isalpha() and len(w) >= 4]
    rng = random.Random(20241017)
    for root in rng.sample(roots, 500):
        words.add(root)
        for pat in rng.sample(PATTERNS, 2):
            words.add(pat.format(root))
    rows = sorted((w, stemmer.stem_word(w)) for w in words)
    with open(OUT, "w") as f:
        for w, s in rows:
            f.write(f"{w}\t{s}\n")
    print(len(rows), sum(1 for w, s in rows if w != s))


if __name__ == "__main__":
    main()
