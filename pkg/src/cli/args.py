"""CLI Argument Parsing"""

import argparse
import argcomplete

from src import __version__
from src.audio import SAMPLE_RATE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pidfuse',
        description='Multi-modal person identification: train, fuse and evaluate over pre-extracted embeddings',
        epilog='Example: pidfuse pipeline -o run/ (synthetic corpus, full grid, MAP report)'
    )

    parser.add_argument('-v', '--version', action='version', version=f'%(prog)s {__version__}')

    # Global options
    parser.add_argument('--config', type=str, metavar='PATH', help='Config file (default: $PIDFUSE_CONFIG, ./.pidfuserc, ~/.pidfuserc)')
    parser.add_argument('--seed', type=int, metavar='N', help='Seed for every random draw (default: 7)')
    parser.add_argument('--threads', type=int, metavar='N', help='Worker threads for grid training (default: 1)')
    parser.add_argument('--cut', type=int, metavar='K', help='Clips kept per person ID (default: 100)')
    parser.add_argument('--verbose', action='store_true', help='Log progress and per-epoch loss to stderr')

    sub = parser.add_subparsers(dest='command', metavar='COMMAND', required=True)

    gen = sub.add_parser('gen', help='Generate a synthetic gallery, training set and ground truth')
    gen.add_argument('-o', '--out', required=True, metavar='DIR', help='Output directory')
    gen.add_argument('--encoding', choices=['text', 'base64'], help='Embedding encoding in corpus files')

    embed = sub.add_parser('embed-audio', help='Compute audio embeddings from raw PCM files and attach them to a corpus')
    embed.add_argument('corpus', metavar='CORPUS', help='Corpus to extend (.jsonl)')
    embed.add_argument('--pcm-dir', required=True, metavar='DIR', help='Directory of <clip_id>.pcm files (16-bit little-endian mono)')
    embed.add_argument('--sample-rate', type=int, default=SAMPLE_RATE, metavar='HZ', help=f'Sample rate of the PCM files; must be {SAMPLE_RATE}')
    embed.add_argument('-o', '--out', required=True, metavar='FILE', help='Output corpus (.jsonl)')

    train = sub.add_parser('train', help='Train the Part A and Part B model grids')
    train.add_argument('corpus', metavar='CORPUS', help='Labeled training corpus (.jsonl)')
    train.add_argument('-o', '--out', required=True, metavar='DIR', help='Model directory')

    predict = sub.add_parser('predict', help='Route a gallery and write every model\'s ranked lists')
    predict.add_argument('models', metavar='MODELS', help='Model directory written by train')
    predict.add_argument('corpus', metavar='CORPUS', help='Gallery corpus (.jsonl)')
    predict.add_argument('-o', '--out', required=True, metavar='FILE', help='Predictions file (.jsonl)')

    fuse = sub.add_parser('fuse', help='Fuse prediction files into one retrieval')
    fuse.add_argument('predictions', nargs='+', metavar='PREDICTIONS', help='Prediction files written by predict')
    fuse.add_argument('-o', '--out', required=True, metavar='FILE', help='Retrieval file (.tsv)')

    ev = sub.add_parser('eval', help='Score a retrieval against ground truth')
    ev.add_argument('retrieval', metavar='RETRIEVAL', help='Retrieval file (.tsv)')
    ev.add_argument('truth', metavar='TRUTH', help='Ground truth (.json)')
    ev.add_argument('--predictions', metavar='FILE', help='Add Part A/B and single-modality rows from this predictions file')
    ev.add_argument('-o', '--out', metavar='FILE', help='Write the JSON report here')
    ev.add_argument('--json', action='store_true', help='Print the JSON report instead of the table')

    pipe = sub.add_parser('pipeline', help='gen (unless corpora are given), train, predict, fuse and eval in one go')
    pipe.add_argument('-o', '--out', required=True, metavar='DIR', help='Output directory for every artifact')
    pipe.add_argument('--train', dest='train_corpus', metavar='CORPUS', help='Training corpus instead of a synthetic one')
    pipe.add_argument('--gallery', metavar='CORPUS', help='Gallery corpus instead of a synthetic one')
    pipe.add_argument('--truth', metavar='FILE', help='Ground truth for --gallery (default: from gallery labels)')

    sub.add_parser('config', help='Show the effective configuration')
    sub.add_parser('completion', help='Show how to install shell tab completion')

    argcomplete.autocomplete(parser)
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
