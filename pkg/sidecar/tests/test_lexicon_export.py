import pytest

from mlm_sidecar.cli import main as cli_main
from mlm_sidecar.lexicon_export import LexicalDatabaseMissing, export_lexicon

# the primary package's loaders define the file contract
from textsiege.lexicon import AntonymPairs, StopwordList, SynonymTable


class TestExport:
    def test_exported_files_parse_under_primary_loaders(self, tmp_path):
        paths = export_lexicon(tmp_path, db_path="bundled")
        table = SynonymTable.load(paths["synonyms"])
        ants = AntonymPairs.load(paths["antonyms"])
        stops = StopwordList.load(paths["stopwords"])
        assert len(table) > 0
        assert ants.is_antonym_pair("good", "bad")
        assert "the" in stops

    def test_good_row_contract(self, tmp_path):
        paths = export_lexicon(tmp_path, db_path="bundled")
        table = SynonymTable.load(paths["synonyms"])
        syns = table.synonyms("good")
        assert len(syns) >= 1
        assert "good" not in [s.lower() for s in syns]

    def test_deterministic_output(self, tmp_path):
        a = export_lexicon(tmp_path / "a", db_path="bundled")
        b = export_lexicon(tmp_path / "b", db_path="bundled")
        for key in a:
            assert a[key].read_bytes() == b[key].read_bytes()

    def test_missing_database_raises(self, tmp_path):
        with pytest.raises(LexicalDatabaseMissing):
            export_lexicon(tmp_path, db_path=tmp_path / "absent.json")

    def test_wordnet_source_unavailable_here(self, tmp_path):
        # no NLTK corpus in this environment: the default source must fail
        # loudly instead of silently degrading
        with pytest.raises(LexicalDatabaseMissing):
            export_lexicon(tmp_path)


class TestExportCli:
    def test_ok_exit_zero(self, tmp_path):
        assert cli_main(["export-lexicon", "--out", str(tmp_path), "--db", "bundled"]) == 0

    def test_missing_database_exit_nonzero(self, tmp_path):
        code = cli_main(
            ["export-lexicon", "--out", str(tmp_path), "--db", str(tmp_path / "no.json")]
        )
        assert code != 0
