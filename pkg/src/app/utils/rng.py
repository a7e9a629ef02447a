from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional

import numpy as np

BLOCK_SIZE = 1 << 16

BlockFn = Callable[[np.random.Generator, int], np.ndarray]


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Генератор PCG64 для потока (seed, key...)"""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *key])))


def block_sizes(count: int, block: int = BLOCK_SIZE) -> List[int]:
    """Разбиение count повторений на блоки фиксированного размера"""
    full, rest = divmod(count, block)
    return [block] * full + ([rest] if rest else [])


def run_blocks(
    fn: BlockFn,
    count: int,
    seed: int,
    key: tuple = (),
    threads: Optional[int] = None,
) -> np.ndarray:
    """
    Запускает fn по блокам в пуле потоков и склеивает результаты в порядке блоков

    Каждый блок получает собственный дочерний поток SeedSequence, поэтому
    результат не зависит от числа потоков.

    Args:
        fn: функция (rng, size) -> массив длины size (или size x k)
        count: общее число повторений
        seed: главное зерно
        key: дополнительный ключ потока (например, индекс точки сетки)
        threads: размер пула; None, тогда из STEIN_THREADS
    """
    if threads is None:
        from ..config.runtime_config import get_runtime_config

        threads = get_runtime_config().threads
    sizes = block_sizes(count)
    if not sizes:
        return np.empty(0)
    children = np.random.SeedSequence([seed, *key]).spawn(len(sizes))
    generators = [np.random.Generator(np.random.PCG64(ss)) for ss in children]
    if threads <= 1 or len(sizes) == 1:
        parts = [fn(g, n) for g, n in zip(generators, sizes)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, generators, sizes))
    return np.concatenate(parts, axis=0)
