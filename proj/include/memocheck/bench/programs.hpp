#pragma once

#include <string_view>
#include <vector>

namespace memocheck::bench {

struct BenchProgram {
  std::string_view name;
  char group;  // a: queues and sets, b: balanced trees and heaps, c: multiway and coloured trees, d: plain trees
  int assertions;
  int regtypes;
  std::string_view source;
};

// Each program defines main/1 taking the list of keys to insert.

inline constexpr std::string_view kAmqueue = R"PL(
% Amortized FIFO queue kept as a front list and a reversed back list.
:- regtype list/2.
list([], _).
list([X|Xs], T) :- call(T, X), list(Xs, T).

:- pred enqueue(X,F0,B0,F,B) : (int(X), list(F0,int), list(B0,int), var(F), var(B))
   => (list(F,int), list(B,int)).
enqueue(X, F, B, F, [X|B]).

:- pred dequeue(F0,B0,X,F,B) : (list(F0,int), list(B0,int), var(X), var(F), var(B))
   => (int(X), list(F,int), list(B,int)).
dequeue([], B0, X, F, []) :- rev(B0, [], R), R = [X|F].
dequeue([X|F], B, X, F, B).

:- pred rev(L,A,R) : (list(L,int), list(A,int), var(R)) => list(R,int).
rev([], A, A).
rev([X|Xs], A, R) :- rev(Xs, [X|A], R).

:- pred drain(F,B,N0,N) : (list(F,int), list(B,int), int(N0), var(N)) => int(N).
drain(F, B, N0, N) :-
    ( F == [], B == [] -> N = N0
    ; dequeue(F, B, _, F1, B1), N1 is N0+1, drain(F1, B1, N1, N) ).

enqueue_all([], F, B, F, B).
enqueue_all([K|Ks], F0, B0, F, B) :- enqueue(K, F0, B0, F1, B1), enqueue_all(Ks, F1, B1, F, B).

main(Ks) :- enqueue_all(Ks, [], [], F, B), drain(F, B, 0, _).
)PL";

inline constexpr std::string_view kSet = R"PL(
% Sets as ordered lists without duplicates.
:- regtype list/2.
list([], _).
list([X|Xs], T) :- call(T, X), list(Xs, T).

:- pred main(Ks) : list(Ks,int).
main(Ks) :- add_all(Ks, [], S), count_members(Ks, S, 0, _).

:- pred add_all(Ks,S0,S) : (list(S0,int), var(S)) => list(S,int).
add_all([], S, S).
add_all([K|Ks], S0, S) :- set_add(K, S0, S1), add_all(Ks, S1, S).

:- pred set_add(X,S0,S) : (int(X), list(S0,int), var(S)) => list(S,int).
set_add(X, S0, S) :- ins(S0, X, S).

ins([], X, [X]).
ins([Y|Ys], X, S) :-
    ( X < Y -> S = [X,Y|Ys]
    ; X =:= Y -> S = [Y|Ys]
    ; S = [Y|S1], ins(Ys, X, S1) ).

:- pred set_member(X,S) : (int(X), list(S,int)).
set_member(X, S) :- mem(S, X).

mem([Y|Ys], X) :- ( X =:= Y -> true ; X > Y -> mem(Ys, X) ).

count_members([], _, N, N).
count_members([K|Ks], S, N0, N) :-
    ( set_member(K, S) -> N1 is N0+1 ; N1 = N0 ),
    count_members(Ks, S, N1, N).
)PL";

inline constexpr std::string_view kAvl = R"PL(
% AVL trees; nodes carry their height.
:- regtype avl/1.
avl(nil).
avl(t(L,K,H,R)) :- avl(L), int(K), int(H), avl(R).

:- pred height(T,H) : (avl(T), var(H)) => int(H).
height(nil, 0).
height(t(_,_,H,_), H).

:- pred max(A,B,M) : (int(A), int(B), var(M)) => int(M).
max(A, B, M) :- ( A >= B -> M = A ; M = B ).

:- pred mknode(L,K,R,T) : (avl(L), int(K), avl(R), var(T)) => avl(T).
mknode(L, K, R, t(L,K,H,R)) :- height(L, HL), height(R, HR), max(HL, HR, M), H is M+1.

:- pred rotate_right(T0,T) : (avl(T0), var(T)) => avl(T).
rotate_right(t(t(A,X,_,B),Y,_,C), T) :- mknode(B, Y, C, R), mknode(A, X, R, T).

:- pred rotate_left(T0,T) : (avl(T0), var(T)) => avl(T).
rotate_left(t(A,X,_,t(B,Y,_,C)), T) :- mknode(A, X, B, L), mknode(L, Y, C, T).

:- pred balance(L,K,R,T) : (avl(L), int(K), avl(R), var(T)) => avl(T).
balance(L, K, R, T) :-
    height(L, HL), height(R, HR), D is HL-HR,
    ( D > 1 ->
        L = t(LL,_,_,LR), height(LL, HLL), height(LR, HLR),
        ( HLL >= HLR -> mknode(L, K, R, T0), rotate_right(T0, T)
        ; rotate_left(L, L1), mknode(L1, K, R, T0), rotate_right(T0, T) )
    ; D < -1 ->
        R = t(RL,_,_,RR), height(RL, HRL), height(RR, HRR),
        ( HRR >= HRL -> mknode(L, K, R, T0), rotate_left(T0, T)
        ; rotate_right(R, R1), mknode(L, K, R1, T0), rotate_left(T0, T) )
    ; mknode(L, K, R, T) ).

:- pred insert(T0,K,T) : (avl(T0), int(K), var(T)) => avl(T).
insert(nil, K, t(nil,K,1,nil)).
insert(t(L,K0,H,R), K, T) :-
    ( K < K0 -> insert(L, K, L1), balance(L1, K0, R, T)
    ; K > K0 -> insert(R, K, R1), balance(L, K0, R1, T)
    ; T = t(L,K0,H,R) ).

:- pred insert_all(Ks,T0,T) : (avl(T0), var(T)) => avl(T).
insert_all([], T, T).
insert_all([K|Ks], T0, T) :- insert(T0, K, T1), insert_all(Ks, T1, T).

main(Ks) :- insert_all(Ks, nil, _).
)PL";

inline constexpr std::string_view kHeap = R"PL(
% Leftist min-heaps: h(Rank, Key, Left, Right).
:- regtype heap/1.
heap(nil).
heap(h(R,K,L,Rt)) :- int(R), int(K), heap(L), heap(Rt).

:- regtype ilist/1.
ilist([]).
ilist([X|Xs]) :- int(X), ilist(Xs).

:- pred main(Ks) : ilist(Ks).
main(Ks) :- insert_all(Ks, nil, H), find_min(H, _), delete_min(H, _).

:- pred rank(H,R) : (heap(H), var(R)) => int(R).
rank(nil, 0).
rank(h(R,_,_,_), R).

:- pred mk(K,A,B,H) : (int(K), heap(A), heap(B), var(H)) => heap(H).
mk(K, A, B, H) :-
    rank(A, RA), rank(B, RB),
    ( RA >= RB -> R is RB+1, H = h(R,K,A,B) ; R is RA+1, H = h(R,K,B,A) ).

:- pred merge(A,B,H) : (heap(A), heap(B), var(H)) => heap(H).
merge(nil, H, H).
merge(h(R1,K1,L1,T1), H2, H) :-
    ( H2 == nil -> H = h(R1,K1,L1,T1)
    ; H2 = h(_,K2,L2,T2),
      ( K1 =< K2 -> merge(T1, H2, M), mk(K1, L1, M, H)
      ; merge(h(R1,K1,L1,T1), T2, M), mk(K2, L2, M, H) ) ).

:- pred insert(K,H0,H) : (int(K), heap(H0), var(H)) => heap(H).
insert(K, H0, H) :- merge(h(1,K,nil,nil), H0, H).

:- pred insert_all(Ks,H0,H) : (heap(H0), var(H)) => heap(H).
insert_all([], H, H).
insert_all([K|Ks], H0, H) :- insert(K, H0, H1), insert_all(Ks, H1, H).

find_min(h(_,K,_,_), K).

:- pred delete_min(H0,H) : (heap(H0), var(H)) => heap(H).
delete_min(h(_,_,L,R), H) :- merge(L, R, H).
)PL";

inline constexpr std::string_view kBtree = R"PL(
% 2-3 trees (B-trees of order 3).
:- regtype btree/1.
btree(leaf).
btree(n2(A,K,B)) :- btree(A), int(K), btree(B).
btree(n3(A,K1,B,K2,C)) :- btree(A), int(K1), btree(B), int(K2), btree(C).

:- regtype ins_res/1.
ins_res(ok(T)) :- btree(T).
ins_res(split(A,K,B)) :- btree(A), int(K), btree(B).

:- regtype order/1.
order(lt).
order(eq).
order(gt).

:- regtype ilist/1.
ilist([]).
ilist([X|Xs]) :- int(X), ilist(Xs).

:- regtype stats/1.
stats(st(N,H)) :- int(N), int(H).

:- pred main(Ks) : ilist(Ks).
main(Ks) :- insert_all(Ks, leaf, T), tree_stats(T, _).

:- pred insert_all(Ks,T0,T) : (btree(T0), var(T)) => btree(T).
insert_all([], T, T).
insert_all([K|Ks], T0, T) :- insert(K, T0, T1), insert_all(Ks, T1, T).

:- pred insert(K,T0,T) : (int(K), btree(T0), var(T)) => btree(T).
insert(K, T0, T) :-
    ins(T0, K, R),
    ( R = ok(T1) -> T = T1 ; R = split(A,M,B), T = n2(A,M,B) ).

:- pred compare_keys(A,B,C) : (int(A), int(B), var(C)) => order(C).
compare_keys(A, B, C) :- ( A < B -> C = lt ; A =:= B -> C = eq ; C = gt ).

:- pred ins(T,K,R) : (btree(T), int(K), var(R)) => ins_res(R).
ins(leaf, K, split(leaf,K,leaf)).
ins(n2(A,K0,B), K, R) :- compare_keys(K, K0, C), ins2(C, K, A, K0, B, R).
ins(n3(A,K1,B,K2,C), K, R) :-
    compare_keys(K, K1, O1),
    ( O1 == gt -> compare_keys(K, K2, O2), ins3(O2, K, A, K1, B, K2, C, R)
    ; O1 == eq -> R = ok(n3(A,K1,B,K2,C))
    ; ins(A, K, RA),
      ( RA = ok(A1) -> R = ok(n3(A1,K1,B,K2,C))
      ; RA = split(X,M,Y), R = split(n2(X,M,Y),K1,n2(B,K2,C)) ) ).

:- pred ins2(O,K,A,K0,B,R) : (order(O), int(K), btree(A), int(K0), btree(B), var(R)) => ins_res(R).
ins2(eq, _, A, K0, B, ok(n2(A,K0,B))).
ins2(lt, K, A, K0, B, R) :-
    ins(A, K, RA),
    ( RA = ok(A1) -> R = ok(n2(A1,K0,B)) ; RA = split(X,M,Y), R = ok(n3(X,M,Y,K0,B)) ).
ins2(gt, K, A, K0, B, R) :-
    ins(B, K, RB),
    ( RB = ok(B1) -> R = ok(n2(A,K0,B1)) ; RB = split(X,M,Y), R = ok(n3(A,K0,X,M,Y)) ).

:- pred ins3(O,K,A,K1,B,K2,C,R) : (order(O), int(K), btree(A), int(K1), btree(B), int(K2), btree(C), var(R))
   => ins_res(R).
ins3(eq, _, A, K1, B, K2, C, ok(n3(A,K1,B,K2,C))).
ins3(lt, K, A, K1, B, K2, C, R) :-
    ins(B, K, RB),
    ( RB = ok(B1) -> R = ok(n3(A,K1,B1,K2,C))
    ; RB = split(X,M,Y), R = split(n2(A,K1,X),M,n2(Y,K2,C)) ).
ins3(gt, K, A, K1, B, K2, C, R) :-
    ins(C, K, RC),
    ( RC = ok(C1) -> R = ok(n3(A,K1,B,K2,C1))
    ; RC = split(X,M,Y), R = split(n2(A,K1,B),K2,n2(X,M,Y)) ).

:- pred count(T,N) : (btree(T), var(N)) => int(N).
count(leaf, 0).
count(n2(A,_,B), N) :- count(A, NA), count(B, NB), N is NA+NB+1.
count(n3(A,_,B,_,C), N) :- count(A, NA), count(B, NB), count(C, NC), N is NA+NB+NC+2.

:- pred tree_stats(T,S) : (btree(T), var(S)) => stats(S).
tree_stats(T, st(N,H)) :- count(T, N), depth(T, H).

depth(leaf, 0).
depth(n2(A,_,_), H) :- depth(A, H0), H is H0+1.
depth(n3(A,_,_,_,_), H) :- depth(A, H0), H is H0+1.
)PL";

inline constexpr std::string_view kRbtree = R"PL(
% Red-black trees with the classic four-case rebalancing.
:- regtype rbtree/1.
rbtree(e).
rbtree(t(C,L,K,R)) :- color(C), rbtree(L), int(K), rbtree(R).

:- regtype color/1.
color(r).
color(b).

:- pred main(Ks) : term(Ks).
main(Ks) :-
    insert_all(Ks, e, T),
    ( is_red(T) -> fail ; true ),
    member_all(Ks, T),
    stats(T, _, _).

:- pred insert_all(Ks,T0,T) : (rbtree(T0), var(T)) => rbtree(T).
insert_all([], T, T).
insert_all([K|Ks], T0, T) :- insert(K, T0, T1), insert_all(Ks, T1, T).

:- pred insert(K,T0,T) : (int(K), rbtree(T0), var(T)) => rbtree(T).
insert(K, T0, T) :- ins(T0, K, T1), blacken(T1, T).

:- pred blacken(T0,T) : (rbtree(T0), var(T)) => rbtree(T).
blacken(e, e).
blacken(t(_,L,K,R), t(b,L,K,R)).

:- pred ins(T0,K,T) : (rbtree(T0), int(K), var(T)) => rbtree(T).
ins(e, K, t(r,e,K,e)).
ins(t(C,L,Y,R), K, T) :-
    ( K < Y -> ins(L, K, L1), balance(C, L1, Y, R, T)
    ; K > Y -> ins(R, K, R1), balance(C, L, Y, R1, T)
    ; T = t(C,L,Y,R) ).

:- pred balance(C,L,K,R,T) : (color(C), rbtree(L), int(K), rbtree(R), var(T)) => rbtree(T).
balance(r, L, K, R, t(r,L,K,R)).
balance(b, L, K, R, T) :- balance_left(L, K, R, T).

:- pred balance_left(L,K,R,T) : (rbtree(L), int(K), rbtree(R), var(T)) => rbtree(T).
balance_left(t(r,t(r,A,X,B),Y,C), Z, D, T) :- !, T = t(r,t(b,A,X,B),Y,t(b,C,Z,D)).
balance_left(t(r,A,X,t(r,B,Y,C)), Z, D, T) :- !, T = t(r,t(b,A,X,B),Y,t(b,C,Z,D)).
balance_left(L, K, R, T) :- balance_right(L, K, R, T).

:- pred balance_right(L,K,R,T) : (rbtree(L), int(K), rbtree(R), var(T)) => rbtree(T).
balance_right(A, X, t(r,t(r,B,Y,C),Z,D), T) :- !, T = t(r,t(b,A,X,B),Y,t(b,C,Z,D)).
balance_right(A, X, t(r,B,Y,t(r,C,Z,D)), T) :- !, T = t(r,t(b,A,X,B),Y,t(b,C,Z,D)).
balance_right(L, K, R, t(b,L,K,R)).

:- pred is_red(T) : rbtree(T).
is_red(t(r,_,_,_)).

:- pred color_of(T,C) : (rbtree(T), var(C)) => color(C).
color_of(e, b).
color_of(t(C,_,_,_), C).

:- pred member(K,T) : (int(K), rbtree(T)).
member(K, t(_,L,Y,R)) :- ( K < Y -> member(K, L) ; K > Y -> member(K, R) ; true ).

:- pred member_all(Ks,T) : rbtree(T).
member_all([], _).
member_all([K|Ks], T) :- member(K, T), member_all(Ks, T).

:- pred count(T,N) : (rbtree(T), var(N)) => int(N).
count(e, 0).
count(t(_,L,_,R), N) :- count(L, NL), count(R, NR), N is NL+NR+1.

:- pred black_height(T,H) : (rbtree(T), var(H)) => int(H).
black_height(e, 1).
black_height(t(_,L,_,_), H) :-
    black_height(L, H0), color_of(L, C),
    ( C == b -> H is H0+1 ; H = H0 ).

:- pred stats(T,N,H) : (rbtree(T), var(N), var(H)) => (int(N), int(H)).
stats(T, N, H) :- count(T, N), black_height(T, H).
)PL";

inline constexpr std::string_view kTree = R"PL(
% Unbalanced binary search trees.
:- regtype tree/1.
tree(nil).
tree(t(L,K,R)) :- tree(L), int(K), tree(R).

:- pred insert(T0,K,T) : (tree(T0), int(K), var(T)) => tree(T).
insert(nil, K, t(nil,K,nil)).
insert(t(L,K0,R), K, T) :-
    ( K < K0 -> T = t(L1,K0,R), insert(L, K, L1)
    ; K > K0 -> T = t(L,K0,R1), insert(R, K, R1)
    ; T = t(L,K0,R) ).

:- pred insert_all(Ks,T0,T) : (tree(T0), var(T)) => tree(T).
insert_all([], T, T).
insert_all([K|Ks], T0, T) :- insert(T0, K, T1), insert_all(Ks, T1, T).

main(Ks) :- insert_all(Ks, nil, _).
)PL";

/// The length micro-benchmark: the calls check on every recursive step
/// re-traverses the remaining list unless the check is memoized.
inline constexpr std::string_view kLength = R"PL(
:- regtype list/2.
list([], _).
list([X|Xs], T) :- call(T, X), list(Xs, T).

:- pred len(L,N) : (list(L,int), var(N)) => int(N).
len([], 0).
len([_|T], N) :- len(T, N0), N is N0+1.

main(Ks) :- len(Ks, _).
)PL";

inline const std::vector<BenchProgram>& programs() {
  static const std::vector<BenchProgram> all{
      {"amqueue", 'a', 4, 1, kAmqueue}, {"set", 'a', 4, 1, kSet},       {"avl-tree", 'b', 8, 1, kAvl},
      {"heap", 'b', 7, 2, kHeap},       {"b-tree", 'c', 9, 5, kBtree},  {"rb-tree", 'c', 15, 2, kRbtree},
      {"tree", 'd', 2, 1, kTree},
  };
  return all;
}

inline const BenchProgram& length_sentinel() {
  static const BenchProgram p{"length", 'd', 1, 1, kLength};
  return p;
}

}  // namespace memocheck::bench
